"""Tokenization, POS tagging, URL chunking and residual extraction for tweets.

Everything here is a pure function of its inputs (plus the bundled lexicon and
stop-word files, which are loaded once and cached).
"""

from __future__ import annotations

import enum
import functools
import os
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Sequence
from urllib.parse import urlsplit, urlunsplit

from nltk.stem.porter import PorterStemmer


class PosClass(str, enum.Enum):
    Url = "Url"
    Hashtag = "Hashtag"
    Mention = "Mention"
    ProperNoun = "ProperNoun"
    CommonNoun = "CommonNoun"
    Adjective = "Adjective"
    Adverb = "Adverb"
    Numeral = "Numeral"
    Pronoun = "Pronoun"
    Verb = "Verb"
    Interjection = "Interjection"
    Preposition = "Preposition"
    Existential = "Existential"
    Determiner = "Determiner"
    Conjunction = "Conjunction"
    Punctuation = "Punctuation"
    Other = "Other"


NOUN_CLASSES = frozenset({PosClass.ProperNoun, PosClass.CommonNoun})
STRIPPED_CLASSES = frozenset({PosClass.Punctuation, PosClass.Determiner, PosClass.Conjunction})
# Lexicon entries of these classes are not overridden by the capitalization rule.
_CLOSED_CLASSES = frozenset({
    PosClass.Determiner, PosClass.Conjunction, PosClass.Preposition,
    PosClass.Pronoun, PosClass.Existential, PosClass.Interjection,
})


@dataclass(frozen=True)
class Token:
    surface: str
    stem: str
    pos: PosClass
    position: int
    is_stop: bool = False


@dataclass(frozen=True)
class TokenizedTweet:
    tweet_id: int
    tokens: tuple[Token, ...]
    chunks: tuple[Token, ...] = ()
    agreement_tokens: tuple[Token, ...] = field(default=())

    @property
    def terms(self) -> tuple[Token, ...]:
        """Tokens visible to keyword matching: text tokens plus URL chunks."""
        return self.tokens + self.chunks

    def term_count(self) -> int:
        return sum(1 for t in self.tokens if t.pos is not PosClass.Punctuation)


_URL_RE = re.compile(r"^(?:https?://|www\.)\S*$", re.IGNORECASE)
_WORD_OR_PUNCT_RE = re.compile(r"[\w'’]+|[^\w\s]+", re.UNICODE)
_DIGIT_RE = re.compile(r"\d")
_TAG_RE = re.compile(r"^([#@])(\w+)(.*)$", re.UNICODE)
_URL_SPLIT_RE = re.compile(r"[/.?=&\-_:#%+~,;!]+")
_SENTENCE_END = frozenset(".!?")

_stemmer = PorterStemmer()


@functools.lru_cache(maxsize=65536)
def stem(word: str) -> str:
    out = _stemmer.stem(word.lower())
    return out or word.lower()


def _read_data(name: str) -> str:
    return resources.files("raprop").joinpath(f"data/{name}").read_text(encoding="utf-8")


def load_lexicon(path: str | None = None) -> dict[str, PosClass]:
    """Load a ``word<TAB>PosClass`` lexicon; ``RAPROP_LEXICON`` overrides the bundled one."""
    return _load_lexicon(path or os.environ.get("RAPROP_LEXICON") or None)


@functools.lru_cache(maxsize=None)
def _load_lexicon(path: str | None) -> dict[str, PosClass]:
    if path:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    else:
        raw = _read_data("lexicon.tsv")
    lexicon: dict[str, PosClass] = {}
    for line in raw.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        word, cls = line.split("\t")[:2]
        lexicon.setdefault(word.strip().lower(), PosClass(cls.strip()))
    return lexicon


@functools.lru_cache(maxsize=None)
def stop_words() -> frozenset[str]:
    return frozenset(w.strip().lower() for w in _read_data("stopwords.txt").splitlines() if w.strip())


def normalize_url(url: str) -> str:
    """Lowercase scheme and host, drop a trailing slash."""
    url = url.strip()
    if url.lower().startswith("www."):
        url = "http://" + url
    parts = urlsplit(url)
    if not parts.scheme or not parts.netloc:
        return url.rstrip("/")
    out = urlunsplit((parts.scheme.lower(), parts.netloc.lower(), parts.path, parts.query, parts.fragment))
    return out.rstrip("/")


def is_url(piece: str) -> bool:
    return bool(_URL_RE.match(piece))


def _split_raw(text: str) -> list[str]:
    """Split into raw surface pieces, keeping URLs, hashtags and mentions whole."""
    pieces: list[str] = []
    for chunk in text.split():
        if is_url(chunk):
            pieces.append(chunk)
            continue
        m = _TAG_RE.match(chunk)
        if m:
            pieces.append(m.group(1) + m.group(2))
            pieces.extend(_WORD_OR_PUNCT_RE.findall(m.group(3)))
            continue
        pieces.extend(_WORD_OR_PUNCT_RE.findall(chunk))
    return pieces


def _shape_class(piece: str) -> PosClass | None:
    if is_url(piece):
        return PosClass.Url
    if piece.startswith("#") and len(piece) > 1:
        return PosClass.Hashtag
    if piece.startswith("@") and len(piece) > 1:
        return PosClass.Mention
    if not any(ch.isalnum() for ch in piece):
        return PosClass.Punctuation
    if _DIGIT_RE.search(piece):
        return PosClass.Numeral
    return None


def tag_pos(pieces: Sequence[str], lexicon: dict[str, PosClass] | None = None) -> list[PosClass]:
    """Assign a coarse POS class to each raw (case-preserved) surface piece.

    Shape rules come first (URL, hashtag, mention, punctuation, digits). Other
    words use the lexicon; an open-class or unknown word that is capitalized
    and not sentence-initial becomes a ProperNoun; unknown words default to
    CommonNoun.
    """
    lexicon = load_lexicon() if lexicon is None else lexicon
    classes: list[PosClass] = []
    sentence_start = True
    for piece in pieces:
        cls = _shape_class(piece)
        if cls is None:
            entry = lexicon.get(piece.lower())
            capitalized = piece[:1].isupper()
            if entry in _CLOSED_CLASSES:
                cls = entry
            elif capitalized and not sentence_start:
                cls = PosClass.ProperNoun
            else:
                cls = entry or PosClass.CommonNoun
        classes.append(cls)
        if cls is PosClass.Punctuation:
            sentence_start = sentence_start or any(ch in _SENTENCE_END for ch in piece)
        else:
            sentence_start = False
    return classes


def _make_token(piece: str, cls: PosClass, position: int) -> Token:
    stops = stop_words()
    if cls is PosClass.Url:
        norm = normalize_url(piece)
        return Token(piece, norm.lower(), cls, position)
    lowered = piece.lower()
    if cls is PosClass.Hashtag:
        return Token(lowered, stem(lowered[1:]), cls, position)
    if cls in (PosClass.Mention, PosClass.Punctuation, PosClass.Numeral):
        return Token(lowered, lowered, cls, position)
    return Token(lowered, stem(lowered), cls, position, is_stop=lowered in stops)


def tokenize(text: str) -> list[Token]:
    """Split, tag and stem ``text``. Stop words are flagged, not removed."""
    pieces = _split_raw(text)
    classes = tag_pos(pieces)
    return [_make_token(p, c, i) for i, (p, c) in enumerate(zip(pieces, classes))]


def url_chunks(url: str, start_position: int = 0) -> list[Token]:
    """Split a URL on special characters into CommonNoun tokens, dropping the scheme."""
    body = re.sub(r"^[a-zA-Z][a-zA-Z0-9+.\-]*://", "", url.strip())
    out: list[Token] = []
    for piece in _URL_SPLIT_RE.split(body):
        if not piece:
            continue
        lowered = piece.lower()
        out.append(Token(lowered, stem(lowered), PosClass.CommonNoun, start_position + len(out),
                         is_stop=lowered in stop_words()))
    return out


def strip_for_agreement(tokens: Iterable[Token]) -> list[Token]:
    """Drop punctuation, determiners, conjunctions and stop words."""
    return [t for t in tokens if t.pos not in STRIPPED_CLASSES and not t.is_stop]


def residual(tokens: Iterable[Token], query_stems: Iterable[str]) -> list[Token]:
    """Tokens whose stem is not a query stem."""
    qs = frozenset(query_stems)
    return [t for t in tokens if t.stem not in qs]


def tokenize_tweet(tweet_id: int, text: str, urls: Sequence[str] = ()) -> TokenizedTweet:
    """Build the full token view of a tweet, including chunks for every URL it carries."""
    tokens = tokenize(text)
    seen: list[str] = []
    for t in tokens:
        if t.pos is PosClass.Url and t.stem not in seen:
            seen.append(t.stem)
    for u in urls:
        n = normalize_url(u).lower()
        if n not in seen:
            seen.append(n)
    in_text = {t.stem for t in tokens}
    chunks: list[Token] = []
    for u in seen:
        if u not in in_text:
            chunks.append(Token(u, u, PosClass.Url, len(tokens) + len(chunks)))
        chunks.extend(url_chunks(u, start_position=len(tokens) + len(chunks)))
    # Url tokens stay in the agreement view (weight 8) alongside their chunks.
    agreement = strip_for_agreement(tokens) + strip_for_agreement(chunks)
    return TokenizedTweet(tweet_id, tuple(tokens), tuple(chunks), tuple(agreement))


def query_stems(text: str) -> list[str]:
    """Distinct content stems of a query, in first-occurrence order."""
    toks = [t for t in tokenize(text) if t.pos is not PosClass.Punctuation]
    content = [t for t in toks if not t.is_stop] or toks
    out: list[str] = []
    for t in content:
        if t.stem not in out:
            out.append(t.stem)
    return out

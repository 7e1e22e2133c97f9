"""Noisy-channel sentence decoding and the word-correction toolkit.

Sentences are decoded from phoneme segments by combining a per-word
edit-distance channel likelihood with an add-k n-gram language model
prior under a beam search. Word alternatives are scored with the same
LM over every n-gram window that covers the edited position, which
captures both left and right context.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING, Any, Callable, Iterable, Mapping, Sequence

if TYPE_CHECKING:  # Rating lives with the state machine; only needed for typing.
    from .state_machine import Rating

START = "<s>"
END = "</s>"

SCORE_EPS = 1e-9


class CorrectionError(Exception):
    """Bad input to a correction operation (index out of range, etc.)."""


class SentenceOrigin(str, Enum):
    DECODED = "Decoded"
    CORRECTED = "Corrected"
    TYPED = "Typed"


@dataclass(frozen=True)
class DecodedSentence:
    """A sentence under construction or correction."""

    words: tuple[str, ...]
    per_word_scores: tuple[float, ...]
    rating: "Rating | None" = None
    origin: SentenceOrigin = SentenceOrigin.DECODED

    def __post_init__(self) -> None:
        if len(self.words) != len(self.per_word_scores):
            raise CorrectionError("words and per_word_scores length mismatch")
        if any(s > SCORE_EPS for s in self.per_word_scores):
            raise CorrectionError("per-word log-probabilities must be <= 0")

    @classmethod
    def from_words(cls, words: Iterable[str],
                   origin: SentenceOrigin = SentenceOrigin.DECODED) -> "DecodedSentence":
        ws = tuple(words)
        return cls(words=ws, per_word_scores=(0.0,) * len(ws), origin=origin)

    @property
    def text(self) -> str:
        return " ".join(self.words)

    @property
    def is_empty(self) -> bool:
        return not self.words

    def to_dict(self) -> dict[str, Any]:
        return {
            "words": list(self.words),
            "per_word_scores": list(self.per_word_scores),
            "rating": self.rating.value if self.rating is not None else None,
            "origin": self.origin.value,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "DecodedSentence":
        from .state_machine import Rating  # deferred: avoids an import cycle

        rating = data.get("rating")
        return cls(
            words=tuple(data["words"]),
            per_word_scores=tuple(float(s) for s in data["per_word_scores"]),
            rating=Rating(rating) if rating is not None else None,
            origin=SentenceOrigin(data.get("origin", "Decoded")),
        )


@dataclass(frozen=True)
class CandidateSet:
    """Ranked (text, score) items, descending score, lexicographic ties."""

    items: tuple[tuple[str, float], ...] = ()
    shown_before: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        texts = [t for t, _ in self.items]
        if len(set(texts)) != len(texts):
            raise CorrectionError("candidate texts must be distinct")
        ordered = sorted(self.items, key=lambda it: (-it[1], it[0]))
        if list(self.items) != ordered:
            raise CorrectionError("candidates must be ordered by (-score, text)")

    @classmethod
    def ranked(cls, scored: Iterable[tuple[str, float]],
               shown_before: Iterable[str] = ()) -> "CandidateSet":
        best: dict[str, float] = {}
        for text, score in scored:
            if text not in best or score > best[text]:
                best[text] = score
        items = tuple(sorted(best.items(), key=lambda it: (-it[1], it[0])))
        return cls(items=items, shown_before=frozenset(shown_before))

    @property
    def texts(self) -> tuple[str, ...]:
        return tuple(t for t, _ in self.items)

    def take(self, k: int) -> "CandidateSet":
        return CandidateSet(items=self.items[:k], shown_before=self.shown_before)

    def to_dict(self) -> dict[str, Any]:
        return {"items": [[t, s] for t, s in self.items],
                "shown_before": sorted(self.shown_before)}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "CandidateSet":
        return cls(items=tuple((str(t), float(s)) for t, s in data.get("items", [])),
                   shown_before=frozenset(data.get("shown_before", [])))


class WordEditKind(str, Enum):
    TYPE_WORD = "TypeWord"
    DELETE_WORD = "DeleteWord"
    ADD_WORD_BEFORE = "AddWordBefore"
    ADD_WORD_AFTER = "AddWordAfter"
    REPLACE_WITH_CANDIDATE = "ReplaceWithCandidate"
    REFRESH = "Refresh"

_TEXT_EDITS = {WordEditKind.TYPE_WORD, WordEditKind.ADD_WORD_BEFORE,
               WordEditKind.ADD_WORD_AFTER}


@dataclass(frozen=True)
class WordEdit:
    kind: WordEditKind
    text: str | None = None
    candidate_index: int | None = None

    def __post_init__(self) -> None:
        if self.kind in _TEXT_EDITS:
            if not self.text or any(c.isspace() for c in self.text):
                raise CorrectionError(
                    f"{self.kind.value} requires non-empty whitespace-free text")
        if self.kind is WordEditKind.REPLACE_WITH_CANDIDATE and self.candidate_index is None:
            raise CorrectionError("ReplaceWithCandidate requires candidate_index")

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind.value}
        if self.text is not None:
            out["text"] = self.text
        if self.candidate_index is not None:
            out["candidate_index"] = self.candidate_index
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "WordEdit":
        return cls(kind=WordEditKind(data["kind"]), text=data.get("text"),
                   candidate_index=data.get("candidate_index"))


class NGramLM:
    """Add-k smoothed n-gram model over a closed vocabulary.

    The vocabulary includes the sentence markers, so for every context
    the probabilities over the full vocabulary sum to exactly 1.
    """

    def __init__(self, order: int, add_k: float,
                 counts: dict[tuple[str, ...], dict[str, int]],
                 vocabulary: frozenset[str]):
        if order < 1:
            raise CorrectionError("order must be >= 1")
        if add_k <= 0:
            raise CorrectionError("add_k must be > 0")
        self.order = order
        self.add_k = add_k
        self.counts = counts
        self.vocabulary = vocabulary
        self._context_totals = {ctx: sum(nexts.values())
                                for ctx, nexts in counts.items()}

    @property
    def words(self) -> tuple[str, ...]:
        """Vocabulary without the sentence markers, sorted."""
        return tuple(sorted(self.vocabulary - {START, END}))

    def _context(self, history: Sequence[str]) -> tuple[str, ...]:
        if self.order == 1:
            return ()
        padded = [START] * (self.order - 1) + list(history)
        return tuple(padded[-(self.order - 1):])

    def prob(self, word: str, history: Sequence[str]) -> float:
        ctx = self._context(history)
        nexts = self.counts.get(ctx, {})
        total = self._context_totals.get(ctx, 0)
        count = nexts.get(word, 0)
        return (count + self.add_k) / (total + self.add_k * len(self.vocabulary))

    def logp(self, word: str, history: Sequence[str]) -> float:
        return math.log(self.prob(word, history))

    def sentence_logp(self, words: Sequence[str]) -> float:
        history: list[str] = []
        total = 0.0
        for w in words:
            total += self.logp(w, history)
            history.append(w)
        total += self.logp(END, history)
        return total

    def to_dict(self) -> dict[str, Any]:
        return {
            "order": self.order,
            "add_k": self.add_k,
            "vocabulary": sorted(self.vocabulary),
            "counts": {" ".join(ctx): dict(sorted(nexts.items()))
                       for ctx, nexts in sorted(self.counts.items())},
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "NGramLM":
        counts = {tuple(ctx.split()) if ctx else (): {w: int(c) for w, c in nexts.items()}
                  for ctx, nexts in data["counts"].items()}
        return cls(order=int(data["order"]), add_k=float(data["add_k"]),
                   counts=counts, vocabulary=frozenset(data["vocabulary"]))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True),
                              encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "NGramLM":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def train_ngram(corpus: Sequence[Sequence[str]], order: int, add_k: float) -> NGramLM:
    """Count n-grams with start/end padding; P(w|ctx)=(c+k)/(total+k|V|)."""
    if not corpus:
        raise CorrectionError("empty corpus")
    if order < 1:
        raise CorrectionError("order must be >= 1")
    if add_k <= 0:
        raise CorrectionError("add_k must be > 0")

    vocab = {START, END}
    counts: dict[tuple[str, ...], dict[str, int]] = {}
    for sentence in corpus:
        words = list(sentence)
        vocab.update(words)
        padded = [START] * (order - 1) + words + [END]
        for i in range(order - 1, len(padded)):
            ctx = tuple(padded[i - order + 1:i]) if order > 1 else ()
            nxt = padded[i]
            counts.setdefault(ctx, {})
            counts[ctx][nxt] = counts[ctx].get(nxt, 0) + 1
    return NGramLM(order=order, add_k=add_k, counts=counts,
                   vocabulary=frozenset(vocab))


def load_corpus(path: str | Path) -> list[list[str]]:
    """One whitespace-tokenized sentence per line."""
    sentences = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            words = line.split()
            if words:
                sentences.append(words)
    if not sentences:
        raise CorrectionError(f"empty corpus file: {path}")
    return sentences


@dataclass(frozen=True)
class ChannelModel:
    """Per-phoneme log-likelihood of observed vs pronounced phonemes.

    Scored by edit-distance DP: matches are free, each substitution /
    deletion / insertion pays its configured log-penalty.
    """

    substitution_logp: float = math.log(0.1)
    deletion_logp: float = math.log(0.1)
    insertion_logp: float = math.log(0.1)
    max_length_diff: int | None = None

    @classmethod
    def exact(cls) -> "ChannelModel":
        """Zero-noise channel: only exact pronunciation matches survive,
        so the true sentence always tops a noiseless decode."""
        ninf = float("-inf")
        return cls(substitution_logp=ninf, deletion_logp=ninf,
                   insertion_logp=ninf)

    def word_logp(self, observed: Sequence[str], pronounced: Sequence[str]) -> float:
        if (self.max_length_diff is not None
                and abs(len(observed) - len(pronounced)) > self.max_length_diff):
            return float("-inf")
        n, m = len(pronounced), len(observed)
        prev = [j * self.insertion_logp for j in range(m + 1)]
        for i in range(1, n + 1):
            cur = [prev[0] + self.deletion_logp]
            for j in range(1, m + 1):
                match = prev[j - 1] + (
                    0.0 if pronounced[i - 1] == observed[j - 1]
                    else self.substitution_logp)
                delete = prev[j] + self.deletion_logp
                insert = cur[j - 1] + self.insertion_logp
                cur.append(max(match, delete, insert))
            prev = cur
        return prev[m]


def score_segment_against_lexicon(
    segment: Sequence[str],
    lexicon: Mapping[str, tuple[str, ...]],
    channel: ChannelModel,
) -> dict[str, float]:
    """Channel log-likelihood of one observed segment for every lexicon word."""
    scores = {}
    for word, phones in lexicon.items():
        logp = channel.word_logp(segment, phones)
        if logp != float("-inf"):
            scores[word] = logp
    return scores


def decode_candidates(
    segments: Sequence[Sequence[str]],
    lexicon: Mapping[str, tuple[str, ...]],
    lm: NGramLM,
    beam_width: int,
    k: int,
    channel: ChannelModel | None = None,
    lm_weight: float = 1.0,
    segment_scores: Sequence[Mapping[str, float]] | None = None,
) -> CandidateSet:
    """Beam search over per-segment word choices.

    Hypothesis score = sum of channel log-likelihoods + lm_weight *
    LM log-probability (including the end-of-sentence transition).
    Returns the top-k sentences; empty when nothing matches.
    """
    if beam_width < k or k < 1:
        raise CorrectionError("require beam_width >= k >= 1")
    channel = channel or ChannelModel()
    if not segments:
        return CandidateSet()

    if segment_scores is None:
        segment_scores = [score_segment_against_lexicon(seg, lexicon, channel)
                          for seg in segments]
    if any(not s for s in segment_scores):
        return CandidateSet()

    # beams: (words tuple, channel+lm score so far)
    beams: list[tuple[tuple[str, ...], float]] = [((), 0.0)]
    for scores in segment_scores:
        extended: list[tuple[tuple[str, ...], float]] = []
        for words, acc in beams:
            for word, chan_logp in scores.items():
                step = chan_logp + lm_weight * lm.logp(word, words)
                extended.append((words + (word,), acc + step))
        extended.sort(key=lambda b: (-b[1], b[0]))
        beams = extended[:beam_width]

    finals = [(words, acc + lm_weight * lm.logp(END, words)) for words, acc in beams]
    ranked = CandidateSet.ranked((" ".join(words), score) for words, score in finals)
    return ranked.take(k)


def rescore(cands: CandidateSet,
            rescorer: Callable[[str, float], float]) -> CandidateSet:
    """Re-rank candidates; texts are preserved, shown_before carries over."""
    rescored = [(text, rescorer(text, score)) for text, score in cands.items]
    return CandidateSet.ranked(rescored, shown_before=cands.shown_before)


def identity_rescorer(text: str, score: float) -> float:
    return score


def constant_rescorer(text: str, score: float) -> float:
    return 0.0


def lm_rescorer(lm: NGramLM, weight: float = 1.0) -> Callable[[str, float], float]:
    def _rescore(text: str, score: float) -> float:
        return score + weight * lm.sentence_logp(text.split())
    return _rescore


def word_alternatives(
    sentence: DecodedSentence,
    index: int,
    lm: NGramLM,
    k: int,
    excluded: Iterable[str] = (),
) -> CandidateSet:
    """Top-k replacement words for position `index`.

    Each vocabulary word is scored by the summed LM log-probability of
    every n-gram window that covers the position, i.e. left-context fit
    times the fit of the following words given the replacement.
    """
    if not 0 <= index < len(sentence.words):
        raise CorrectionError(f"word index {index} out of range")
    excluded_set = set(excluded) | {sentence.words[index]}

    words = list(sentence.words)
    padded_tail = words[index + 1:] + [END]

    def window_score(candidate: str) -> float:
        total = lm.logp(candidate, words[:index])
        history = words[:index] + [candidate]
        # Windows where the candidate is still inside the LM context.
        for offset, nxt in enumerate(padded_tail):
            if offset >= lm.order - 1:
                break
            total += lm.logp(nxt, history)
            history.append(nxt)
        return total

    scored = [(w, window_score(w)) for w in lm.words if w not in excluded_set]
    ranked = CandidateSet.ranked(scored, shown_before=excluded_set)
    return ranked.take(k)


def apply_edit(
    sentence: DecodedSentence,
    index: int,
    edit: WordEdit,
    alternatives: Sequence[str] = (),
) -> DecodedSentence:
    """Apply one word edit; the result's origin becomes Corrected.

    Deleting the only word yields an (allowed) empty sentence. Refresh
    is a no-op here; fetching new suggestions is the caller's job.
    """
    if edit.kind is WordEditKind.REFRESH:
        return sentence

    words = list(sentence.words)
    scores = list(sentence.per_word_scores)
    n = len(words)

    if edit.kind in (WordEditKind.TYPE_WORD, WordEditKind.DELETE_WORD,
                     WordEditKind.REPLACE_WITH_CANDIDATE):
        if not 0 <= index < n:
            raise CorrectionError(f"word index {index} out of range for {edit.kind.value}")
    else:  # AddWordBefore / AddWordAfter
        if not 0 <= index < max(n, 1):
            raise CorrectionError(f"word index {index} out of range for {edit.kind.value}")

    if edit.kind is WordEditKind.TYPE_WORD:
        words[index] = edit.text  # type: ignore[assignment]
        scores[index] = 0.0
    elif edit.kind is WordEditKind.DELETE_WORD:
        del words[index]
        del scores[index]
    elif edit.kind is WordEditKind.ADD_WORD_BEFORE:
        words.insert(index, edit.text)  # type: ignore[arg-type]
        scores.insert(index, 0.0)
    elif edit.kind is WordEditKind.ADD_WORD_AFTER:
        words.insert(index + 1, edit.text)  # type: ignore[arg-type]
        scores.insert(index + 1, 0.0)
    elif edit.kind is WordEditKind.REPLACE_WITH_CANDIDATE:
        assert edit.candidate_index is not None
        if not 0 <= edit.candidate_index < len(alternatives):
            raise CorrectionError(
                f"candidate index {edit.candidate_index} out of range")
        words[index] = alternatives[edit.candidate_index]
        scores[index] = 0.0

    return replace(sentence, words=tuple(words), per_word_scores=tuple(scores),
                   origin=SentenceOrigin.CORRECTED)


class CorrectionPipeline:
    """Bundles lexicon + LM + channel into the FSM's correction providers.

    Segment-vs-lexicon channel scores are memoized per observed segment,
    which keeps incremental (greedy) decoding and later beam decoding
    from re-running the alignment DP.
    """

    def __init__(
        self,
        lexicon: Mapping[str, tuple[str, ...]],
        lm: NGramLM,
        channel: ChannelModel | None = None,
        beam_width: int = 16,
        k: int = 5,
        alternatives_k: int = 5,
        lm_weight: float = 1.0,
        rescorer: Callable[[str, float], float] | None = None,
    ):
        if beam_width < k or k < 1:
            raise CorrectionError("require beam_width >= k >= 1")
        self.lexicon = dict(lexicon)
        self.lm = lm
        self.channel = channel or ChannelModel(max_length_diff=3)
        self.beam_width = beam_width
        self.k = k
        self.alternatives_k = alternatives_k
        self.lm_weight = lm_weight
        self.rescorer = rescorer
        self._segment_cache: dict[tuple[str, ...], dict[str, float]] = {}

    def _segment_scores(self, segment: Sequence[str]) -> dict[str, float]:
        key = tuple(segment)
        cached = self._segment_cache.get(key)
        if cached is None:
            cached = score_segment_against_lexicon(key, self.lexicon, self.channel)
            if not cached:
                # Length pruning removed everything; fall back to exact DP.
                relaxed = ChannelModel(self.channel.substitution_logp,
                                       self.channel.deletion_logp,
                                       self.channel.insertion_logp)
                cached = score_segment_against_lexicon(key, self.lexicon, relaxed)
            self._segment_cache[key] = cached
        return cached

    def greedy_word(self, segment: Sequence[str]) -> str | None:
        """Channel-only best word for one segment (real-time partials)."""
        scores = self._segment_scores(segment)
        if not scores:
            return None
        return min(scores.items(), key=lambda it: (-it[1], it[0]))[0]

    def candidates(self, sentence: DecodedSentence,
                   segments: Sequence[Sequence[str]]) -> CandidateSet:
        """Candidate sentences for the correction screen.

        Falls back to the sentence itself when there are no phoneme
        observations to re-decode (e.g. typed or already-edited text).
        """
        if not segments:
            if sentence.is_empty:
                return CandidateSet()
            return CandidateSet.ranked([(sentence.text, 0.0)])
        scores = [self._segment_scores(seg) for seg in segments]
        cands = decode_candidates(
            [tuple(s) for s in segments], self.lexicon, self.lm,
            beam_width=self.beam_width, k=self.k, channel=self.channel,
            lm_weight=self.lm_weight, segment_scores=scores)
        if self.rescorer is not None:
            cands = rescore(cands, self.rescorer)
        return cands

    def alternatives(self, sentence: DecodedSentence, index: int,
                     excluded: frozenset[str]) -> CandidateSet:
        return word_alternatives(sentence, index, self.lm,
                                 self.alternatives_k, excluded)


def load_filter_words(path: str | Path) -> frozenset[str]:
    words = set()
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            word = line.strip().lower()
            if word:
                words.add(word)
    return frozenset(words)


def mask_word(word: str) -> str:
    return word[0] + "*" * (len(word) - 1) if word else word


def language_filter(sentence: DecodedSentence, wordlist: Iterable[str],
                    enabled: bool) -> DecodedSentence:
    """Mask listed words (first char + asterisks); identity when disabled."""
    if not enabled:
        return sentence
    listed = {w.lower() for w in wordlist}
    masked = tuple(mask_word(w) if w.lower() in listed else w
                   for w in sentence.words)
    if masked == sentence.words:
        return sentence
    return replace(sentence, words=masked)


def filter_text(words: Sequence[str], wordlist: Iterable[str], enabled: bool) -> str:
    """Joined text form of the filter, for TTS / host typing."""
    if not enabled:
        return " ".join(words)
    listed = {w.lower() for w in wordlist}
    return " ".join(mask_word(w) if w.lower() in listed else w for w in words)

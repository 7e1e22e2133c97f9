from __future__ import annotations

import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bciui.correction_engine import (
    END,
    CandidateSet,
    ChannelModel,
    CorrectionError,
    CorrectionPipeline,
    DecodedSentence,
    SentenceOrigin,
    WordEdit,
    WordEditKind,
    apply_edit,
    constant_rescorer,
    decode_candidates,
    filter_text,
    identity_rescorer,
    language_filter,
    lm_rescorer,
    rescore,
    score_segment_against_lexicon,
    train_ngram,
    word_alternatives,
)


class TestTrainNgram:
    def test_hand_counted_bigram_probability(self):
        lm = train_ngram([["a", "b"], ["a", "b"]], 2, 1.0)
        # V = {a, b, START, END}; P(b|a) = (2+1)/(2+1*4)
        assert lm.prob("b", ["a"]) == pytest.approx(0.5, abs=1e-12)

    def test_unseen_context_is_uniform(self):
        lm = train_ngram([["a", "b"]], 2, 1.0)
        assert lm.prob("a", ["zzz"]) == pytest.approx(1.0 / 4.0, abs=1e-12)

    def test_all_context_distributions_sum_to_one(self):
        corpus = [["a", "b", "c"], ["b", "a"], ["c", "c", "a", "b"]]
        lm = train_ngram(corpus, 3, 0.01)
        for ctx in lm.counts:
            total = sum(lm.prob(w, list(ctx)) for w in lm.vocabulary)
            assert total == pytest.approx(1.0, abs=1e-9)

    def test_sentence_logp_includes_end_transition(self):
        lm = train_ngram([["a"]], 2, 1.0)
        expected = math.log(lm.prob("a", [])) + math.log(lm.prob(END, ["a"]))
        assert lm.sentence_logp(["a"]) == pytest.approx(expected)

    def test_empty_corpus_rejected(self):
        with pytest.raises(CorrectionError):
            train_ngram([], 2, 1.0)

    def test_json_round_trip(self, toy_lm):
        from bciui.correction_engine import NGramLM

        clone = NGramLM.from_dict(toy_lm.to_dict())
        assert clone.prob("are", ["hello", "how"]) == pytest.approx(
            toy_lm.prob("are", ["hello", "how"]), abs=1e-15)


def brute_force_ranking(segments, lexicon, lm, channel, lm_weight=1.0):
    """Score every |V|^m word sequence; the oracle for beam equivalence.

    Accumulates per position (channel then LM term) so exact ranking
    comparison is not defeated by 1-ulp reassociation on tied scores.
    """
    vocab = sorted(lexicon)
    scored = []
    for words in itertools.product(vocab, repeat=len(segments)):
        total = 0.0
        history: list[str] = []
        for seg, word in zip(segments, words):
            total += channel.word_logp(seg, lexicon[word]) + lm_weight * lm.logp(
                word, history)
            history.append(word)
        total += lm_weight * lm.logp(END, history)
        scored.append((" ".join(words), total))
    scored.sort(key=lambda it: (-it[1], it[0]))
    return scored


class TestDecodeCandidates:
    def test_noiseless_recovery(self, toy_lexicon, toy_lm):
        segments = [toy_lexicon["hello"], toy_lexicon["how"],
                    toy_lexicon["are"], toy_lexicon["you"]]
        cands = decode_candidates(segments, toy_lexicon, toy_lm,
                                  beam_width=200, k=3)
        assert cands.texts[0] == "hello how are you"

    @pytest.mark.parametrize("length", [1, 2, 3])
    def test_exhaustive_beam_matches_brute_force(self, toy_lexicon, toy_lm, length):
        """5-word lexicon, sentences <= 3 words: beam covering the whole
        hypothesis space must reproduce the brute-force ranking exactly."""
        channel = ChannelModel()
        segments = [toy_lexicon[w] for w in ["hello", "did", "you"][:length]]
        total = 5 ** length
        cands = decode_candidates(segments, toy_lexicon, toy_lm,
                                  beam_width=total, k=total, channel=channel)
        oracle = brute_force_ranking(segments, toy_lexicon, toy_lm, channel)
        assert list(cands.items) == [
            (text, pytest.approx(score, abs=1e-9)) for text, score in oracle]

    def test_lm_preferred_candidate_survives_channel_preference(self, toy_lexicon,
                                                                toy_lm):
        """One substituted phoneme makes 'did' the channel favorite at
        position 2, but the LM prior keeps 'are' in the top candidates."""
        # Intended "how are you"; channel turned AA R into D R (one sub
        # away from 'are', but also edit-distance 2 from 'did').
        observed = [toy_lexicon["how"], ("D", "R"), toy_lexicon["you"]]
        channel = ChannelModel()
        chan_scores = score_segment_against_lexicon(observed[1], toy_lexicon, channel)
        # Hand-computed channel alignment: 'are' needs one substitution,
        # 'did' needs one substitution + one deletion.
        assert chan_scores["are"] == pytest.approx(math.log(0.1), abs=1e-12)
        assert chan_scores["did"] == pytest.approx(2 * math.log(0.1), abs=1e-12)
        cands = decode_candidates(observed, toy_lexicon, toy_lm,
                                  beam_width=125, k=5, channel=channel)
        assert "how are you" in cands.texts
        assert cands.texts[0] == "how are you"

    def test_no_match_returns_empty(self, toy_lexicon, toy_lm):
        channel = ChannelModel(max_length_diff=0)
        cands = decode_candidates([("K",) * 30], toy_lexicon, toy_lm,
                                  beam_width=5, k=5, channel=channel)
        assert cands.items == ()

    def test_empty_segments_return_empty(self, toy_lexicon, toy_lm):
        assert decode_candidates([], toy_lexicon, toy_lm, 5, 5).items == ()

    def test_beam_narrower_than_k_rejected(self, toy_lexicon, toy_lm):
        with pytest.raises(CorrectionError):
            decode_candidates([("HH",)], toy_lexicon, toy_lm, beam_width=2, k=5)

    def test_noiseless_exact_channel_always_ranks_truth_first(self, toy_lexicon,
                                                              toy_lm):
        """With a zero-noise channel model, the true sentence tops the
        candidates for every 1- and 2-word sentence, even at k=1; the
        LM can reorder only among exact segment matches."""
        channel = ChannelModel.exact()
        vocab = sorted(toy_lexicon)
        sentences = [(w,) for w in vocab]
        sentences += [(a, b) for a in vocab for b in vocab]
        for sentence in sentences:
            segments = [toy_lexicon[w] for w in sentence]
            cands = decode_candidates(segments, toy_lexicon, toy_lm,
                                      beam_width=25, k=1, channel=channel)
            assert cands.texts == (" ".join(sentence),)

    def test_exact_channel_yields_empty_set_when_nothing_matches(self, toy_lexicon,
                                                                 toy_lm):
        cands = decode_candidates([("ZH", "ZH")], toy_lexicon, toy_lm,
                                  beam_width=5, k=5, channel=ChannelModel.exact())
        assert cands.items == ()


class TestRescore:
    def test_identity_is_fixed_point(self, toy_lexicon, toy_lm):
        cands = CandidateSet.ranked([("a b", -1.0), ("c d", -2.0)])
        assert rescore(cands, identity_rescorer) == cands

    def test_constant_rescorer_falls_back_to_lexicographic(self):
        cands = CandidateSet.ranked([("b b", -1.0), ("a a", -2.0), ("c c", -0.5)])
        rescored = rescore(cands, constant_rescorer)
        assert rescored.texts == ("a a", "b b", "c c")

    def test_lm_rescorer_promotes_in_domain_sentence(self):
        lm = train_ngram([["hello", "how", "are", "you"]] * 5, 2, 0.01)
        cands = CandidateSet.ranked([
            ("hello how did you", -1.0),   # channel favorite
            ("hello how are you", -1.5),
        ])
        rescored = rescore(cands, lm_rescorer(lm, weight=1.0))
        assert rescored.texts[0] == "hello how are you"
        assert set(rescored.texts) == set(cands.texts)


class TestWordAlternatives:
    def test_documented_correction_example(self):
        corpus = [["hello", "how", "are", "you"]] * 20 + [["hello", "how", "did", "you"]]
        lm = train_ngram(corpus, 3, 0.01)
        sentence = DecodedSentence.from_words(("hello", "how", "did", "you"))
        alts = word_alternatives(sentence, 2, lm, k=3)
        assert alts.texts[0] == "are"
        assert "did" not in alts.texts  # current word always excluded

    def test_k_larger_than_vocabulary_returns_all_remaining(self, toy_lm):
        sentence = DecodedSentence.from_words(("hello", "how"))
        alts = word_alternatives(sentence, 1, toy_lm, k=100)
        assert set(alts.texts) == {"are", "did", "you", "hello"}

    def test_refresh_never_repeats(self, bundled_lm):
        sentence = DecodedSentence.from_words(("i", "want", "some", "water"))
        seen: set[str] = set()
        excluded: set[str] = set()
        for _ in range(4):
            alts = word_alternatives(sentence, 3, bundled_lm, k=5,
                                     excluded=excluded)
            assert not (set(alts.texts) & seen)
            seen |= set(alts.texts)
            excluded |= set(alts.texts)

    def test_index_out_of_range(self, toy_lm):
        sentence = DecodedSentence.from_words(("hello",))
        with pytest.raises(CorrectionError):
            word_alternatives(sentence, 1, toy_lm, k=3)


class TestApplyEdit:
    def test_documented_type_word(self):
        s = DecodedSentence.from_words(("hello", "how", "did", "you"))
        edited = apply_edit(s, 2, WordEdit(WordEditKind.TYPE_WORD, text="are"))
        assert edited.words == ("hello", "how", "are", "you")
        assert edited.origin is SentenceOrigin.CORRECTED

    def test_delete_then_add_before_is_inverse(self):
        s = DecodedSentence.from_words(("a", "b", "c"))
        deleted = apply_edit(s, 1, WordEdit(WordEditKind.DELETE_WORD))
        restored = apply_edit(deleted, 1,
                              WordEdit(WordEditKind.ADD_WORD_BEFORE, text="b"))
        assert restored.words == s.words

    def test_delete_only_word_yields_flagged_empty(self):
        s = DecodedSentence.from_words(("solo",))
        edited = apply_edit(s, 0, WordEdit(WordEditKind.DELETE_WORD))
        assert edited.is_empty

    def test_replace_with_candidate_uses_alternatives(self):
        s = DecodedSentence.from_words(("a", "b"))
        edited = apply_edit(s, 1,
                            WordEdit(WordEditKind.REPLACE_WITH_CANDIDATE,
                                     candidate_index=1),
                            alternatives=("x", "y"))
        assert edited.words == ("a", "y")

    def test_out_of_range_rejected(self):
        s = DecodedSentence.from_words(("a",))
        with pytest.raises(CorrectionError):
            apply_edit(s, 3, WordEdit(WordEditKind.DELETE_WORD))

    def test_refresh_is_identity_here(self):
        s = DecodedSentence.from_words(("a", "b"))
        assert apply_edit(s, 0, WordEdit(WordEditKind.REFRESH)) == s

    def test_whitespace_in_typed_word_rejected(self):
        with pytest.raises(CorrectionError):
            WordEdit(WordEditKind.TYPE_WORD, text="two words")

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.sampled_from(
        ["type", "delete", "add_before", "add_after"]), max_size=12))
    def test_random_edit_sequences_match_reference_lists(self, ops):
        """Property fuzz against a plain-list reference implementation."""
        words = ["w0", "w1", "w2"]
        sentence = DecodedSentence.from_words(tuple(words))
        counter = 0
        for op in ops:
            if not words:
                break
            index = counter % len(words)
            counter += 1
            if op == "type":
                edit = WordEdit(WordEditKind.TYPE_WORD, text=f"t{counter}")
                words[index] = f"t{counter}"
            elif op == "delete":
                edit = WordEdit(WordEditKind.DELETE_WORD)
                del words[index]
            elif op == "add_before":
                edit = WordEdit(WordEditKind.ADD_WORD_BEFORE, text=f"b{counter}")
                words.insert(index, f"b{counter}")
            else:
                edit = WordEdit(WordEditKind.ADD_WORD_AFTER, text=f"a{counter}")
                words.insert(index + 1, f"a{counter}")
            sentence = apply_edit(sentence, index, edit)
            assert list(sentence.words) == words
            assert len(sentence.per_word_scores) == len(sentence.words)


class TestLanguageFilter:
    def test_disabled_is_identity(self):
        s = DecodedSentence.from_words(("damn", "right"))
        assert language_filter(s, ["damn"], enabled=False) == s

    def test_masks_listed_word(self):
        s = DecodedSentence.from_words(("damn", "right"))
        masked = language_filter(s, ["damn"], enabled=True)
        assert masked.words == ("d***", "right")

    def test_case_insensitive(self):
        s = DecodedSentence.from_words(("Damn",))
        masked = language_filter(s, ["damn"], enabled=True)
        assert masked.words == ("D***",)

    def test_filter_text_joins(self):
        assert filter_text(("oh", "damn"), ["damn"], True) == "oh d***"
        assert filter_text(("oh", "damn"), ["damn"], False) == "oh damn"


class TestCandidateSet:
    def test_strictly_ordered_with_lexicographic_ties(self):
        cands = CandidateSet.ranked([("b", -1.0), ("a", -1.0), ("c", 0.0)])
        assert cands.texts == ("c", "a", "b")

    def test_duplicate_texts_keep_best_score(self):
        cands = CandidateSet.ranked([("a", -2.0), ("a", -1.0), ("b", -1.5)])
        assert cands.items == (("a", -1.0), ("b", -1.5))

    def test_unordered_construction_rejected(self):
        with pytest.raises(CorrectionError):
            CandidateSet(items=(("a", -2.0), ("b", -1.0)))

    def test_monotone_scores_invariant(self, toy_lexicon, toy_lm):
        segments = [toy_lexicon["hello"], toy_lexicon["how"]]
        cands = decode_candidates(segments, toy_lexicon, toy_lm,
                                  beam_width=25, k=25)
        scores = [s for _, s in cands.items]
        assert scores == sorted(scores, reverse=True)


class TestPipeline:
    def test_greedy_word_prefers_exact_channel_match(self, toy_lexicon, toy_lm):
        pipeline = CorrectionPipeline(toy_lexicon, toy_lm)
        assert pipeline.greedy_word(toy_lexicon["hello"]) == "hello"

    def test_candidates_without_segments_fall_back_to_sentence(self, toy_lexicon,
                                                               toy_lm):
        pipeline = CorrectionPipeline(toy_lexicon, toy_lm)
        s = DecodedSentence.from_words(("hello", "you"))
        cands = pipeline.candidates(s, ())
        assert cands.texts == ("hello you",)

    def test_segment_cache_is_transparent(self, toy_lexicon, toy_lm):
        pipeline = CorrectionPipeline(toy_lexicon, toy_lm)
        seg = toy_lexicon["did"]
        first = pipeline.candidates(DecodedSentence.from_words(("did",)), (seg,))
        second = pipeline.candidates(DecodedSentence.from_words(("did",)), (seg,))
        assert first == second

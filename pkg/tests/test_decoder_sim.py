from __future__ import annotations

import math

import numpy as np
import pytest

from bciui.decoder_sim import (
    ARPABET,
    CalibrationError,
    ClickDecoderParams,
    ConfigurationError,
    CursorDecoderParams,
    GazePathSegment,
    LexiconError,
    NeuralFrame,
    SpeechChannelConfig,
    calibrate_click,
    calibrate_cursor,
    decode_click,
    decode_cursor,
    gaze_stream,
    segment_phonemes,
    synth_cursor_frames,
    synth_speech,
)


def matvec_oracle(W, x, b):
    """Scalar triple-loop product, independent of numpy's matmul."""
    rows, cols = len(W), len(W[0])
    out = [0.0, 0.0]
    for i in range(rows):
        acc = 0.0
        for j in range(cols):
            acc += W[i][j] * x[j]
        out[i] = acc + b[i]
    return out


class TestDecodeCursor:
    def test_zero_map(self):
        params = CursorDecoderParams(W=np.zeros((2, 4)), b=np.zeros(2))
        v = decode_cursor(NeuralFrame(np.array([1.0, -2.0, 3.0, 4.0])), params)
        assert np.array_equal(v, np.zeros(2))

    def test_coordinate_extraction(self):
        W = np.zeros((2, 5))
        W[0, 0] = 1.0
        W[1, 1] = 1.0
        params = CursorDecoderParams(W=W, b=np.zeros(2))
        v = decode_cursor(NeuralFrame(np.array([3.0, -2.0, 0.0, 7.0, 1.0])), params)
        assert v.tolist() == [3.0, -2.0]

    def test_matches_triple_loop_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            f = int(rng.integers(1, 20))
            W = rng.normal(size=(2, f))
            b = rng.normal(size=2)
            x = rng.normal(size=f)
            got = decode_cursor(NeuralFrame(x), CursorDecoderParams(W=W, b=b))
            want = matvec_oracle(W.tolist(), x.tolist(), b.tolist())
            for g, w in zip(got, want):
                assert abs(g - w) <= 1e-12 * max(1.0, abs(w))

    def test_linearity_without_bias(self):
        rng = np.random.default_rng(8)
        params = CursorDecoderParams(W=rng.normal(size=(2, 6)), b=np.zeros(2))
        for _ in range(50):
            x, y = rng.normal(size=6), rng.normal(size=6)
            a, c = rng.normal(), rng.normal()
            lhs = decode_cursor(NeuralFrame(a * x + c * y), params)
            rhs = (a * decode_cursor(NeuralFrame(x), params)
                   + c * decode_cursor(NeuralFrame(y), params))
            assert np.max(np.abs(lhs - rhs)) < 1e-10

    def test_dimension_mismatch(self):
        params = CursorDecoderParams(W=np.zeros((2, 4)), b=np.zeros(2))
        with pytest.raises(ConfigurationError):
            decode_cursor(NeuralFrame(np.zeros(5)), params)


class TestDecodeClick:
    def test_zero_weights_give_half_and_no_fire(self):
        params = ClickDecoderParams(w=np.zeros(3))
        decision = decode_click(NeuralFrame(np.ones(3), t_ms=1000), params)
        assert decision.p == 0.5
        assert not decision.fired  # strict inequality at the threshold

    def test_strong_score_fires_outside_refractory(self):
        params = ClickDecoderParams(w=np.array([10.0]))
        decision = decode_click(NeuralFrame(np.array([1.0]), t_ms=1000), params,
                                last_click_ms=0)
        assert decision.p > 0.9999
        assert abs(decision.p - 1.0 / (1.0 + math.exp(-10.0))) < 1e-15
        assert decision.fired

    def test_refractory_suppresses(self):
        params = ClickDecoderParams(w=np.array([10.0]), refractory_ms=300)
        frame = NeuralFrame(np.array([1.0]), t_ms=1000)
        assert decode_click(frame, params, last_click_ms=900).fired is False
        assert decode_click(frame, params, last_click_ms=700).fired is True

    def test_probability_monotone_in_score_and_bounded(self):
        params = ClickDecoderParams(w=np.array([1.0]))
        scores = np.linspace(-50, 50, 101)
        ps = [decode_click(NeuralFrame(np.array([s])), params).p for s in scores]
        assert all(0.0 < p < 1.0 for p in ps)
        assert all(b >= a for a, b in zip(ps, ps[1:]))


class TestCalibrateCursor:
    def test_noiseless_recovery(self):
        rng = np.random.default_rng(21)
        f = 8
        true = CursorDecoderParams(W=rng.normal(size=(2, f)), b=rng.normal(size=2))
        X = rng.normal(size=(3 * f, f))
        samples = [(NeuralFrame(x), true.W @ x + true.b) for x in X]
        got = calibrate_cursor(samples)
        assert np.max(np.abs(got.W - true.W)) < 1e-9
        assert np.max(np.abs(got.b - true.b)) < 1e-9

    def test_noisy_recovery_within_tolerance(self):
        rng = np.random.default_rng(22)
        f = 16
        true = CursorDecoderParams(W=rng.normal(size=(2, f)), b=rng.normal(size=2))
        X = rng.normal(size=(50 * f, f))
        samples = [
            (NeuralFrame(x), true.W @ x + true.b + rng.normal(0, 0.01, size=2))
            for x in X
        ]
        got = calibrate_cursor(samples)
        assert np.max(np.abs(got.W - true.W)) < 0.05
        assert np.max(np.abs(got.b - true.b)) < 0.05

    def test_underdetermined_fails(self):
        rng = np.random.default_rng(23)
        samples = [(NeuralFrame(rng.normal(size=8)), np.zeros(2)) for _ in range(8)]
        with pytest.raises(CalibrationError):
            calibrate_cursor(samples)

    def test_rank_deficient_fails(self):
        x = np.ones(4)
        samples = [(NeuralFrame(x), np.zeros(2)) for _ in range(10)]
        with pytest.raises(CalibrationError):
            calibrate_cursor(samples)

    def test_local_optimality_of_least_squares(self):
        """Fitted params beat a grid of perturbed candidates on residual."""
        rng = np.random.default_rng(24)
        f = 4
        X = rng.normal(size=(40, f))
        Y = rng.normal(size=(40, 2))
        samples = [(NeuralFrame(x), y) for x, y in zip(X, Y)]
        fit = calibrate_cursor(samples)

        def residual(W, b):
            return float(np.sum((X @ W.T + b - Y) ** 2))

        base = residual(fit.W, fit.b)
        for _ in range(60):
            dW = rng.normal(0, 0.05, size=(2, f))
            db = rng.normal(0, 0.05, size=2)
            assert residual(fit.W + dW, fit.b + db) >= base - 1e-9

    def test_synth_frames_round_trip(self):
        rng = np.random.default_rng(25)
        f = 6
        true = CursorDecoderParams(W=rng.normal(size=(2, f)), b=rng.normal(size=2))
        velocities = rng.normal(size=(4 * f, 2))
        samples = synth_cursor_frames(true, velocities, noise_sigma=0.0, seed=3)
        for frame, v in samples:
            assert np.max(np.abs(decode_cursor(frame, true) - v)) < 1e-9


class TestCalibrateClick:
    def _clusters(self, rng, n=150, gap=4.0):
        pos = rng.normal(size=(n, 2)) + gap
        neg = rng.normal(size=(n, 2)) - gap
        samples = [(NeuralFrame(x), 1) for x in pos]
        samples += [(NeuralFrame(x), 0) for x in neg]
        return samples

    def test_separable_clusters_high_accuracy(self):
        rng = np.random.default_rng(31)
        samples = self._clusters(rng)
        params = calibrate_click(samples)
        correct = 0
        for frame, label in samples:
            decision = decode_click(frame, params)
            correct += int((decision.p > 0.5) == bool(label))
        assert correct / len(samples) >= 0.99

    def test_label_flip_negates_weights(self):
        rng = np.random.default_rng(32)
        samples = self._clusters(rng, n=60)
        flipped = [(f, 1 - y) for f, y in samples]
        a = calibrate_click(samples)
        b = calibrate_click(flipped)
        assert np.max(np.abs(a.w + b.w)) < 1e-9
        assert abs(a.c + b.c) < 1e-9

    def test_empty_samples_fail(self):
        with pytest.raises(CalibrationError):
            calibrate_click([])

    def test_single_class_fails(self):
        samples = [(NeuralFrame(np.ones(2)), 1) for _ in range(10)]
        with pytest.raises(CalibrationError):
            calibrate_click(samples)


class TestSynthSpeech:
    def test_noiseless_is_exact_concatenation(self, toy_lexicon):
        events = synth_speech(["hi"], {"hi": ("HH", "AY")}, SpeechChannelConfig())
        assert [(e.kind, e.label) for e in events] == [
            ("phoneme", "HH"), ("phoneme", "AY"), ("word_boundary", "hi")]

    def test_noiseless_multiword_with_boundaries(self, toy_lexicon):
        events = synth_speech(["hello", "how"], toy_lexicon, SpeechChannelConfig())
        segments = segment_phonemes(events)
        assert segments == [["HH", "AH", "L", "OW"], ["HH", "AW"]]

    def test_forced_substitution_changes_single_phoneme(self):
        cfg = SpeechChannelConfig(substitution_rate=0.999, seed=5)
        events = synth_speech(["a"], {"a": ("AH",)}, cfg)
        phonemes = [e.label for e in events if e.kind == "phoneme"]
        assert len(phonemes) == 1
        assert phonemes[0] != "AH"

    def test_monte_carlo_substitution_rate(self):
        """Original phonemes are all K; a substitution never re-emits the
        original, so the non-K output fraction estimates the rate."""
        n = 10_000
        lexicon = {"w": ("K",) * n}
        cfg = SpeechChannelConfig(substitution_rate=0.1, seed=123)
        phonemes = [e.label for e in synth_speech(["w"], lexicon, cfg)
                    if e.kind == "phoneme"]
        assert len(phonemes) == n
        non_k = sum(1 for p in phonemes if p != "K")
        assert non_k / n == pytest.approx(0.1, abs=0.01)

    def test_monte_carlo_deletion_rate(self):
        n = 10_000
        lexicon = {"w": ("K",) * n}
        cfg = SpeechChannelConfig(deletion_rate=0.05, seed=124)
        phonemes = [e for e in synth_speech(["w"], lexicon, cfg)
                    if e.kind == "phoneme"]
        assert (n - len(phonemes)) / n == pytest.approx(0.05, abs=0.01)

    def test_monte_carlo_insertion_rate(self):
        n = 10_000
        lexicon = {"w": ("K",) * n}
        cfg = SpeechChannelConfig(insertion_rate=0.05, seed=125)
        phonemes = [e for e in synth_speech(["w"], lexicon, cfg)
                    if e.kind == "phoneme"]
        assert (len(phonemes) - n) / n == pytest.approx(0.05, abs=0.01)

    def test_monte_carlo_combined_rates(self):
        """All three rates at once: expected length shift and non-original
        fraction follow from the configured rates."""
        n = 10_000
        lexicon = {"w": ("K",) * n}
        cfg = SpeechChannelConfig(substitution_rate=0.1, deletion_rate=0.05,
                                  insertion_rate=0.05, seed=126)
        phonemes = [e.label for e in synth_speech(["w"], lexicon, cfg)
                    if e.kind == "phoneme"]
        # E[len] = n(1 - del + ins); E[non-K] = n(sub + ins * 38/39).
        assert len(phonemes) / n == pytest.approx(1.0, abs=0.01)
        non_k = sum(1 for p in phonemes if p != "K")
        expected = 0.1 + 0.05 * (len(ARPABET) - 1) / len(ARPABET)
        assert non_k / n == pytest.approx(expected, abs=0.01)

    def test_deterministic_for_seed(self, toy_lexicon):
        cfg = SpeechChannelConfig(substitution_rate=0.3, deletion_rate=0.1,
                                  insertion_rate=0.1, seed=77)
        a = synth_speech(["hello", "how", "are", "you"], toy_lexicon, cfg)
        b = synth_speech(["hello", "how", "are", "you"], toy_lexicon, cfg)
        assert a == b

    def test_out_of_lexicon_names_word(self, toy_lexicon):
        with pytest.raises(LexiconError, match="zebra"):
            synth_speech(["hello", "zebra"], toy_lexicon, SpeechChannelConfig())

    def test_invalid_rates_rejected(self):
        with pytest.raises(ConfigurationError):
            SpeechChannelConfig(substitution_rate=0.5, deletion_rate=0.5)


class TestGazeStream:
    def test_sigma_zero_reproduces_path_exactly(self):
        path = [GazePathSegment(point=(100.0, 200.0), dwell_ms=1000)]
        samples = gaze_stream(path, jitter_sigma=0.0, rate_hz=60)
        assert len(samples) == 60
        assert all(s.p == (100.0, 200.0) and s.valid for s in samples)

    def test_jitter_std_within_ten_percent(self):
        path = [GazePathSegment(point=(960.0, 540.0), dwell_ms=10_000 * 1000 / 60)]
        samples = gaze_stream(path, jitter_sigma=5.0, rate_hz=60, seed=4)
        assert len(samples) == 10_000
        xs = np.array([s.p[0] for s in samples])
        ys = np.array([s.p[1] for s in samples])
        spread = np.std(np.concatenate([xs - 960.0, ys - 540.0]))
        assert abs(spread - 5.0) <= 0.5

    def test_invalid_segments_pass_through_unmodified(self):
        path = [GazePathSegment(point=(10.0, 10.0), dwell_ms=100, valid=False)]
        samples = gaze_stream(path, jitter_sigma=25.0, rate_hz=60, seed=9)
        assert all(not s.valid and s.p == (10.0, 10.0) for s in samples)

    def test_deterministic_for_seed(self):
        path = [GazePathSegment(point=(5.0, 5.0), dwell_ms=500)]
        a = gaze_stream(path, jitter_sigma=3.0, rate_hz=120, seed=11)
        b = gaze_stream(path, jitter_sigma=3.0, rate_hz=120, seed=11)
        assert a == b

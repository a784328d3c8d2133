import numpy as np
import pytest

from hdseizure.classifier import (
    CLASS_ICTAL,
    CLASS_INTERICTAL,
    AssociativeMemory,
    DetectionModel,
    classify,
    classify_rows,
    ictal_train_span_s,
    load_model,
    model_from_bytes,
    model_to_bytes,
    save_model,
    train_ictal,
    train_interictal,
)
from hdseizure.errors import DataError
from hdseizure.hypervector import (
    KIND_CODE,
    KIND_TIE_PROTO,
    HdConfig,
    Hypervector,
    TieRule,
    hamming_normalized,
)

from conftest import naive_majority


def _rows(cfg, indices):
    return np.stack([Hypervector.random(cfg, KIND_CODE, i).words for i in indices])


def _trained_am(cfg, ict_indices, int_indices):
    am = AssociativeMemory(cfg)
    train_ictal(am, _rows(cfg, ict_indices))
    train_interictal(am, _rows(cfg, list(int_indices) * (80 // len(int_indices))))
    return am


def test_interictal_span_must_be_80_vectors(cfg10k):
    am = AssociativeMemory(cfg10k)
    with pytest.raises(DataError, match="40 s"):
        train_interictal(am, _rows(cfg10k, range(79)))
    train_interictal(am, _rows(cfg10k, range(80)))
    assert am.interictal_acc.n_added == 80


def test_identical_vectors_give_that_prototype(cfg10k):
    h = Hypervector.random(cfg10k, KIND_CODE, 1)
    am = AssociativeMemory(cfg10k)
    train_interictal(am, np.tile(h.words, (80, 1)))
    train_ictal(am, np.tile(h.words, (20, 1)))
    assert am.interictal_prototype == h
    assert am.ictal_prototype == h


def test_double_training_leaves_prototype_unchanged(cfg10k):
    rows = _rows(cfg10k, range(80))
    am = AssociativeMemory(cfg10k)
    train_interictal(am, rows)
    once = am.interictal_prototype
    train_interictal(am, rows)  # counts double; majority invariant
    assert am.interictal_acc.n_added == 160
    assert am.interictal_prototype == once


def test_prototype_matches_naive_oracle(cfg64):
    rng = np.random.default_rng(3)
    bits = rng.integers(0, 2, size=(20, 64), dtype=np.uint8)
    rows = np.stack([Hypervector.from_bits(cfg64, b).words for b in bits])
    am = AssociativeMemory(cfg64)
    train_ictal(am, rows)
    tie = TieRule(cfg64, kind=KIND_TIE_PROTO, index=CLASS_ICTAL)
    tie_bits = np.unpackbits(tie.mask().view(np.uint8), bitorder="little")[:64]
    assert np.array_equal(am.ictal_prototype.to_bits(), naive_majority(bits, tie_bits))


def test_incremental_equals_batch_training(cfg64):
    rng = np.random.default_rng(4)
    a = rng.integers(0, 2, size=(20, 64), dtype=np.uint8)
    b = rng.integers(0, 2, size=(40, 64), dtype=np.uint8)
    rows_a = np.stack([Hypervector.from_bits(cfg64, x).words for x in a])
    rows_b = np.stack([Hypervector.from_bits(cfg64, x).words for x in b])
    inc = AssociativeMemory(cfg64)
    train_ictal(inc, rows_a)
    train_ictal(inc, rows_b)
    batch = AssociativeMemory(cfg64)
    train_ictal(batch, np.concatenate([rows_b, rows_a]))  # order-invariant sums
    assert np.array_equal(inc.ictal_acc.counts, batch.ictal_acc.counts)
    assert inc.ictal_prototype == batch.ictal_prototype


def test_ictal_window_length_rule():
    assert ictal_train_span_s(120.0) == 30.0  # long seizure caps at 30 s
    assert ictal_train_span_s(15.0) == 15.0   # min(max(10, 15), 30)
    assert ictal_train_span_s(10.0) == 10.0   # shortest dataset seizure
    assert ictal_train_span_s(7.0) == 7.0     # shorter than 10 s: use full segment


def test_classify_returns_exact_prototype_labels(cfg10k):
    am = _trained_am(cfg10k, range(100, 120), range(200, 240))
    lab = classify(am, am.ictal_prototype)
    assert lab.value == "ictal" and lab.distance_ictal == 0.0
    lab = classify(am, am.interictal_prototype)
    assert lab.value == "interictal" and lab.distance_interictal == 0.0


def test_classify_tie_prefers_interictal(cfg64):
    am = _trained_am(cfg64, [1], [2])
    ict = am.ictal_prototype.to_bits()
    inter = am.interictal_prototype.to_bits()
    differ = np.flatnonzero(ict != inter)
    if len(differ) % 2:  # make the differing set even so a perfect split exists
        differ = differ[:-1]
    q = inter.copy()
    q[differ[: len(differ) // 2]] = ict[differ[: len(differ) // 2]]
    lab = classify(am, Hypervector.from_bits(cfg64, q))
    assert lab.distance_ictal == lab.distance_interictal
    assert lab.value == "interictal"


def test_classify_untrained_errors(cfg64):
    am = AssociativeMemory(cfg64)
    with pytest.raises(DataError, match="untrained"):
        classify(am, Hypervector.zero(cfg64))
    train_ictal(am, _rows(cfg64, [0]))
    with pytest.raises(DataError, match="untrained"):
        classify(am, Hypervector.zero(cfg64))


def test_decision_depends_only_on_distance_sign(cfg10k):
    am = _trained_am(cfg10k, range(10, 30), range(50, 90))
    rng = np.random.default_rng(0)
    for i in range(10):
        q = Hypervector.random(cfg10k, KIND_CODE, 300 + i)
        lab = classify(am, q)
        assert (lab.value == "ictal") == (lab.distance_ictal < lab.distance_interictal)
        # complementing both prototypes and the query preserves every distance
        flipped = classify_like(am, q)
        assert flipped == lab.value


def classify_like(am, q):
    d_i = hamming_normalized(q.complement(), am.ictal_prototype.complement())
    d_n = hamming_normalized(q.complement(), am.interictal_prototype.complement())
    return "ictal" if d_i < d_n else "interictal"


def test_classify_rows_matches_scalar(cfg10k):
    am = _trained_am(cfg10k, range(10, 30), range(50, 90))
    qs = [Hypervector.random(cfg10k, KIND_CODE, 400 + i) for i in range(8)]
    rows = np.stack([q.words for q in qs])
    mask, d_i, d_n = classify_rows(am, rows)
    for k, q in enumerate(qs):
        lab = classify(am, q)
        assert mask[k] == (lab.value == "ictal")
        assert d_i[k] == pytest.approx(lab.distance_ictal)
        assert d_n[k] == pytest.approx(lab.distance_interictal)


def test_model_round_trip_bit_exact(tmp_path, cfg10k):
    am = _trained_am(cfg10k, range(20), range(100, 140))
    model = DetectionModel(cfg=cfg10k, l=6, n_electrodes=36, t_p=9, am=am)
    blob = model_to_bytes(model)
    back = model_from_bytes(blob)
    assert model_to_bytes(back) == blob  # save(load(x)) == x
    assert back.cfg == cfg10k and back.l == 6 and back.n_electrodes == 36 and back.t_p == 9
    assert back.am.ictal_prototype == am.ictal_prototype
    assert back.am.interictal_prototype == am.interictal_prototype
    assert np.array_equal(back.am.ictal_acc.counts, am.ictal_acc.counts)
    path = tmp_path / "m.hdsz"
    save_model(model, path)
    assert model_to_bytes(load_model(path)) == blob


def test_model_grows_after_reload(cfg64):
    """Accumulators persist in the file, so few-shot growth keeps working."""
    am = _trained_am(cfg64, [1, 2], [3])
    model = DetectionModel(cfg=cfg64, l=6, n_electrodes=4, t_p=10, am=am)
    back = model_from_bytes(model_to_bytes(model))
    train_ictal(back.am, _rows(cfg64, [7, 8]))
    fresh = _trained_am(cfg64, [1, 2], [3])
    train_ictal(fresh, _rows(cfg64, [7, 8]))
    assert back.am.ictal_prototype == fresh.ictal_prototype


def test_model_file_corruption_errors(cfg64):
    am = _trained_am(cfg64, [1], [2])
    blob = model_to_bytes(DetectionModel(cfg=cfg64, l=6, n_electrodes=2, t_p=10, am=am))
    with pytest.raises(DataError, match="magic"):
        model_from_bytes(b"XXXX" + blob[4:])
    with pytest.raises(DataError, match="version"):
        model_from_bytes(blob[:4] + b"\x07\x00" + blob[6:])
    with pytest.raises(DataError, match="truncated"):
        model_from_bytes(blob[:-5])
    with pytest.raises(DataError, match="t_p"):
        DetectionModel(cfg=cfg64, l=6, n_electrodes=2, t_p=0, am=am).validate()


def test_desk_scale_window_separation():
    """One-shot training labels >= 95% of held-out windows correctly."""
    from hdseizure.dataset import SynthParams, synth_patient
    from hdseizure.pipeline import (
        RunParams,
        encode,
        ictal_training_rows,
        interictal_training_rows,
        label_stream,
        train_model,
    )

    params = RunParams(d=2048, seed=3)
    recs = synth_patient(
        SynthParams(n_electrodes=8, seizure_len_s=20, seed=60, interictal_s=60, postictal_s=20),
        2,
        "SEP",
    )
    encs = [encode(r, params) for r in recs]
    model = train_model(encs[:1], params)
    test = encs[1]
    labels = label_stream(model, test)
    times = test.label_times
    ict_mask = (times > test.onset_s + 0.5) & (times <= test.offset_s)
    int_mask = ((times > 2.0) & (times <= test.onset_s)) | (times > test.offset_s + 1.0)
    assert labels[ict_mask].mean() >= 0.95
    assert 1.0 - labels[int_mask].mean() >= 0.95

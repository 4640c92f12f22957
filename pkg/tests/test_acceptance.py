"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Criteria 1 and 9 have a dataset-dependent branch: point CMLYRICS_DATASET at
the annotated corpus file (JSON lines) to enable it. Without the dataset the
documented fallback applies (property-based checks / shipped sample corpus).

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines as they print.
"""

import itertools
import os
import time

import numpy as np
import pytest

from cmlyrics import classic, neural
from cmlyrics.cli import main as cli_main
from cmlyrics.cmfeatures import extract_code_mixed_features
from cmlyrics.corpus import EXCITING, NON_EXCITING, load_corpus, save_corpus
from cmlyrics.embeddings import (
    EmbeddingConfig, EmbeddingTable, PAD, PAD_IDX, UNK, load_embeddings,
    save_embeddings, train_embeddings,
)
from cmlyrics.experiment import ExperimentConfig, run_experiment
from cmlyrics.kernels import backend as K
from cmlyrics.langid import (
    CrfTrainConfig, LangResources, tag_accuracy, train_crf,
)
from cmlyrics.langid.crf import crf_log_likelihood_grad, CrfModel
import synth

DATASET = os.environ.get("CMLYRICS_DATASET")


def _criterion(n, desc, fn):
    t0 = time.monotonic()
    try:
        fn()
    except Exception:
        print(f"\ncriterion {n}: FAIL - {desc}")
        raise
    print(f"\ncriterion {n}: PASS - {desc} ({time.monotonic() - t0:.1f}s)")


def test_criterion_1_dataset_ordering():
    def run():
        if not DATASET or not os.path.exists(DATASET or ""):
            # dataset not distributed with the package and not supplied via
            # CMLYRICS_DATASET; the property-based criteria 2-8 stand in
            return
        corpus = load_corpus(DATASET)
        from conftest import SAMPLE_TAGGED
        from cmlyrics.langid import read_tagged
        res = LangResources.load()
        crf = train_crf(read_tagged(SAMPLE_TAGGED), res)
        cfg = ExperimentConfig(k=5, seed=42, learning_rate=0.1,
                               models=("nb", "nb_cm", "svm", "svm_cm",
                                       "cmnn", "cmnn_cm"))
        rows = run_experiment(cfg, corpus=corpus, crf=crf, res=res)
        acc = {r.model_id: r.mean_accuracy for r in rows}
        assert acc[2] > acc[1]    # NB+cm > NB
        assert acc[4] > acc[3]    # SVM+cm > SVM
        assert acc[10] > acc[9]   # CMNN+cm > CMNN
        assert abs(acc[10] - 0.766) <= 0.08
    _criterion(1, "qualitative ordering on the published dataset "
                  "(skipped branch: dataset unavailable, property-based "
                  "criteria apply)", run)


def test_criterion_2_crf_oracles():
    start = time.monotonic()

    def run():
        rng = np.random.default_rng(100)
        K_ = 3
        for _ in range(200):
            T = int(rng.integers(1, 7))
            phi = rng.normal(0, 2, (T, K_))
            trans = rng.normal(0, 2, (K_ + 1, K_))
            log_z, _, _ = K.crf_forward_backward(phi, trans)
            # brute force over all K^T paths
            best_score, best_path = -np.inf, None
            z_terms = []
            for path in itertools.product(range(K_), repeat=T):
                s = trans[K_, path[0]] + phi[0, path[0]]
                for t in range(1, T):
                    s += trans[path[t - 1], path[t]] + phi[t, path[t]]
                z_terms.append(s)
                if s > best_score:
                    best_score, best_path = s, path
            brute = float(np.logaddexp.reduce(z_terms))
            assert abs(log_z - brute) / max(1.0, abs(brute)) < 1e-9
            vit = K.crf_viterbi(phi, trans)
            v_score = trans[K_, vit[0]] + phi[0, vit[0]] + sum(
                trans[vit[t - 1], vit[t]] + phi[t, vit[t]] for t in range(1, T))
            assert v_score == pytest.approx(best_score, abs=1e-9)

        res = LangResources(english_lexicon={"aa", "bb"},
                            telugu_postpositions={"lo"})
        h = 1e-6
        for trial in range(20):
            trng = np.random.default_rng(200 + trial)
            sents = synth.tagged_sentences(300 + trial,
                                           ["aa", "bb", "cc"],
                                           ["dd", "ee", "ff"], res, n=3)
            model = CrfModel()
            for s in sents:
                model.featurize(s.sentence(), res, grow=True)
            model.emission_weights = np.zeros((len(model.feature_index),
                                               len(model.tagset)))
            params = model.get_params()
            params[:] = trng.normal(0, 0.5, params.shape)
            model.set_params(params)
            _, grad = crf_log_likelihood_grad(model, sents, res)
            for i in trng.choice(params.size, 25, replace=False):
                orig = params[i]
                params[i] = orig + h
                model.set_params(params)
                lp, _ = crf_log_likelihood_grad(model, sents, res)
                params[i] = orig - h
                model.set_params(params)
                lm, _ = crf_log_likelihood_grad(model, sents, res)
                params[i] = orig
                model.set_params(params)
                fd = (lp - lm) / (2 * h)
                assert abs(fd - grad[i]) / max(1e-4, abs(fd) + abs(grad[i])) \
                    < 1e-4
        assert time.monotonic() - start < 60

    _criterion(2, "CRF partition function, Viterbi and gradient vs oracles "
                  "(< 60 s)", run)


def test_criterion_3_neural_kernel_gradients():
    start = time.monotonic()

    def run():
        rng = np.random.default_rng(400)
        h = 1e-6

        def fd_check(arr, grad, loss, k=12):
            flat, gflat = arr.ravel(), np.asarray(grad).ravel()
            for i in rng.choice(flat.size, min(k, flat.size), replace=False):
                orig = flat[i]
                flat[i] = orig + h
                lp = loss()
                flat[i] = orig - h
                lm = loss()
                flat[i] = orig
                fd = (lp - lm) / (2 * h)
                assert abs(fd - gflat[i]) / max(1e-6, abs(fd) + abs(gflat[i])) \
                    < 1e-3

        # conv kernel
        for _ in range(10):
            L, D, F = int(rng.integers(2, 7)), 3, 2
            x = rng.normal(0, 1, (L, D))
            filt = rng.normal(0, 1, (3, D, F))
            bias = rng.normal(0, 1, F)
            dpre = rng.normal(0, 1, (L, F))
            dx, dfilt, dbias = K.conv1d_w3_backward(x, filt, dpre)
            loss = lambda: float((K.conv1d_w3(x, filt, bias) * dpre).sum())
            for arr, grad in ((x, dx), (filt, dfilt), (bias, dbias)):
                fd_check(arr, grad, loss)

        # LSTM through BPTT
        for _ in range(10):
            L, D, H = 4, 3, 3
            x = rng.normal(0, 1, (L, D))
            wx = rng.normal(0, 0.4, (D, 4 * H))
            wh = rng.normal(0, 0.4, (H, 4 * H))
            b = rng.normal(0, 0.4, 4 * H)
            dh = rng.normal(0, 1, (L, H))
            hs, cs, gs = K.lstm_forward(x, wx, wh, b)
            dx, dwx, dwh, db = K.lstm_backward(x, wx, wh, hs, cs, gs, dh)
            loss = lambda: float((K.lstm_forward(x, wx, wh, b)[0] * dh).sum())
            for arr, grad in ((x, dx), (wx, dwx), (wh, dwh), (b, db)):
                fd_check(arr, grad, loss)

        # mean pool, fusion layer and softmax/cross-entropy via the full model
        vocab = {PAD: 0, UNK: 1}
        for i in range(8):
            vocab[f"w{i}"] = len(vocab)
        vectors = rng.normal(0, 0.3, (len(vocab), 5))
        vectors[PAD_IDX] = 0.0
        table = EmbeddingTable(vocab=vocab, vectors=vectors, d=5)
        for trial in range(10):
            model = neural.init_model(neural.ARCH_CMNN, True, table,
                                      n_filters=3, hidden_size=3,
                                      fusion_size=3, max_len=5, seed=trial)
            seq = neural.pad_sequence(["w0", "w3", "w1", "w6"], 5, table)
            cm = rng.normal(0, 1, 4)
            label = EXCITING if trial % 2 else NON_EXCITING
            _, grads = neural.loss_and_grads(model, seq, cm, label)
            loss = lambda: neural.loss_and_grads(model, seq, cm, label)[0]
            for name, arr in model.param_dict().items():
                fd_check(arr, grads[name], loss, k=8)
        assert time.monotonic() - start < 60

    _criterion(3, "conv/LSTM/pool/fusion/softmax finite-difference gradient "
                  "checks (< 60 s)", run)


def test_criterion_4_synthetic_langid():
    start = time.monotonic()

    def run():
        en, te, res = synth.make_pools(500, 150, 150)
        sents = synth.tagged_sentences(501, en, te, res, n=200)
        train, heldout = sents[:160], sents[160:]
        model = train_crf(train, res, CrfTrainConfig(), dev=heldout)
        assert tag_accuracy(model, heldout, res) == 1.0
        assert time.monotonic() - start < 30

    _criterion(4, "100% held-out accuracy on the lexicon-separable corpus "
                  "(< 30 s)", run)


def test_criterion_5_code_mix_features():
    start = time.monotonic()

    def run():
        from test_cmfeatures import WORKED_EXAMPLE, _oracle
        f = extract_code_mixed_features(WORKED_EXAMPLE)
        assert (f.s1, f.s2, f.s3, f.s4) == (4, 3.25, 1, 3.0)
        en, te, _res = synth.make_pools(502, 60, 60)
        rng = np.random.default_rng(503)
        for _ in range(100):
            tagged = synth.random_tagged_song(rng, en, te)
            g = extract_code_mixed_features(tagged)
            s1, s2, s3, s4 = _oracle(tagged)
            assert (g.s1, g.s3) == (s1, s3)
            assert g.s2 == pytest.approx(s2) and g.s4 == pytest.approx(s4)
        assert time.monotonic() - start < 5

    _criterion(5, "code-mix features match the worked example and the "
                  "counting oracle (< 5 s)", run)


def test_criterion_6_classical_oracles():
    start = time.monotonic()

    def run():
        from cmlyrics.corpus import Song
        docs = [Song(id="d0", title="", raw_text="a b a", text="a b a"),
                Song(id="d1", title="", raw_text="b c", text="b c")]
        v = classic.build_vocab(docs, min_count=1)
        vec = classic.tfidf(v, docs[0])
        got = dict(zip(vec.indices.tolist(), vec.values.tolist()))
        assert got[v.term_index["a"]] == pytest.approx(0.9421, abs=1e-4)
        assert got[v.term_index["b"]] == pytest.approx(0.3351, abs=1e-4)

        rng = np.random.default_rng(504)
        for _ in range(50):
            vectors, labels = [], []
            for i in range(8):
                nnz = int(rng.integers(1, 6))
                idx = np.sort(rng.choice(5, nnz, replace=False)).astype(np.int64)
                vals = rng.random(nnz)
                vectors.append(classic.SparseVec(idx, vals))
                labels.append(EXCITING if i % 2 == 0 else NON_EXCITING)
            model = classic.train_nb(vectors, labels, 5, alpha=1.0)
            probe = vectors[int(rng.integers(8))]
            _, post = classic.predict_nb(model, probe)
            dense = np.zeros(5)
            dense[probe.indices] = probe.values
            scores = model.class_log_prior + model.term_log_likelihood @ dense
            expected = np.exp(scores - scores.max())
            expected /= expected.sum()
            assert np.allclose(post, expected, atol=1e-9)

        pos = classic.SparseVec(np.array([0]), np.array([1.0]))
        neg = classic.SparseVec(np.array([0]), np.array([-1.0]))
        vectors = [pos, neg] * 10
        labels = [EXCITING, NON_EXCITING] * 10
        svm = classic.train_svm(vectors, labels, 1,
                                cfg=classic.SvmTrainConfig(epochs=30, seed=0))
        assert all(classic.predict_svm(svm, v_) == l_
                   for v_, l_ in zip(vectors, labels))
        assert time.monotonic() - start < 30

    _criterion(6, "tf-idf hand example, NB posterior oracle and SVM toy "
                  "separation (< 30 s)", run)


def test_criterion_7_end_to_end_synthetic():
    start = time.monotonic()

    def run():
        en, te, res = synth.make_pools(505, 1200, 1200)
        crf = train_crf(synth.tagged_sentences(506, en, te, res, n=150), res,
                        CrfTrainConfig(epochs=5, seed=0))
        corpus = synth.count_corpus(507, en, te, n_songs=1000)
        cfg = ExperimentConfig(
            k=5, seed=42, models=("svm", "svm_cm", "cmnn", "cmnn_cm"),
            min_count=1, emb_dim=32, emb_epochs=2, epochs=6,
            learning_rate=0.1, n_filters=16, hidden_size=16, fusion_size=8)
        rows = run_experiment(cfg, corpus=corpus, crf=crf, res=res)
        acc = {r.model_id: r.mean_accuracy for r in rows}
        assert acc[4] - acc[3] >= 0.05    # SVM+cm over SVM
        assert acc[10] - acc[9] >= 0.05   # CMNN+cm over CMNN
        assert acc[10] >= 0.90
        assert time.monotonic() - start < 600

    _criterion(7, "code-mix variants beat plain SVM/CMNN by >= 5 points and "
                  "CMNN+cm >= 90% on the 1000-song synthetic corpus "
                  "(< 10 min)", run)


def test_criterion_8_determinism(tmp_path):
    def run():
        en, te, res = synth.make_pools(508, 120, 120)
        lex = tmp_path / "english.txt"
        lex.write_text("\n".join(en) + "\n")
        postpos = tmp_path / "postpos.txt"
        postpos.write_text("lo\nki\ntho\n")
        corpus_path = tmp_path / "songs.jsonl"
        save_corpus(synth.count_corpus(509, en, te, n_songs=40), corpus_path)
        sents = synth.tagged_sentences(510, en, te, res, n=60)
        crf = train_crf(sents, res, CrfTrainConfig(epochs=3, seed=0))
        from cmlyrics.langid import save_model as save_crf, \
            load_model as load_crf
        crf_path = tmp_path / "crf.json"
        save_crf(crf, crf_path)
        cfg_path = tmp_path / "exp.cfg"
        cfg_path.write_text(
            f"corpus = {corpus_path}\nlangid_model = {crf_path}\n"
            f"lexicon = {lex}\npostpositions = {postpos}\n"
            "k = 3\nseed = 5\nmin_count = 1\nsvm_epochs = 10\n"
            "emb_dim = 8\nemb_epochs = 1\nepochs = 2\nn_filters = 4\n"
            "hidden_size = 4\nfusion_size = 4\n")
        reports = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            rc = cli_main(["evaluate", "--config", str(cfg_path),
                           "--models", "nb,svm_cm,cnn", "--format", "csv",
                           "--out", str(out)])
            assert rc == 0
            reports.append(out.read_bytes())
        assert reports[0] == reports[1]

        # exact model-file round-trips
        again = load_crf(crf_path)
        assert np.array_equal(again.emission_weights, crf.emission_weights)
        assert np.array_equal(again.transition_weights, crf.transition_weights)

        corpus = load_corpus(corpus_path)
        table = train_embeddings(list(corpus),
                                 EmbeddingConfig(d=8, epochs=1, min_count=1,
                                                 seed=0))
        emb_path = tmp_path / "emb.txt"
        save_embeddings(table, emb_path)
        table2 = load_embeddings(emb_path)
        assert np.array_equal(table.vectors, table2.vectors)

        songs = list(corpus)
        vocab = classic.build_vocab(songs, min_count=1)
        vecs = [classic.tfidf(vocab, s) for s in songs]
        labels = [s.label for s in songs]
        nb = classic.train_nb(vecs, labels, len(vocab))
        classic.save_nb(nb, tmp_path / "nb.json")
        nb2 = classic.load_nb(tmp_path / "nb.json")
        assert np.array_equal(nb.term_log_likelihood, nb2.term_log_likelihood)
        svm = classic.train_svm(vecs, labels, len(vocab),
                                cfg=classic.SvmTrainConfig(epochs=5, seed=0))
        classic.save_svm(svm, tmp_path / "svm.json")
        svm2 = classic.load_svm(tmp_path / "svm.json")
        assert np.array_equal(svm.weights, svm2.weights)
        assert svm.bias == svm2.bias

        nn = neural.init_model(neural.ARCH_CMNN, True, table, n_filters=4,
                               hidden_size=4, fusion_size=4, max_len=6, seed=1)
        neural.save_model(nn, tmp_path / "nn.json")
        nn2 = neural.load_model(tmp_path / "nn.json")
        for k_, v_ in nn.param_dict().items():
            assert np.array_equal(v_, nn2.param_dict()[k_]), k_

    _criterion(8, "byte-identical repeated evaluations and exact model-file "
                  "round-trips", run)


def test_criterion_9_corpus_statistics(tmp_path):
    def run():
        if DATASET and os.path.exists(DATASET):
            corpus = load_corpus(DATASET)
            n_ex = sum(1 for s in corpus if s.label == EXCITING)
            n_non = sum(1 for s in corpus if s.label == NON_EXCITING)
            assert (len(corpus), n_ex, n_non) == (1744, 830, 914)
            return
        from conftest import SAMPLE_CORPUS
        corpus = load_corpus(SAMPLE_CORPUS)
        assert len(corpus) > 0
        for s in corpus:
            assert s.id and s.label in (EXCITING, NON_EXCITING)
            assert s.text == s.text.strip("\n")
        out = tmp_path / "round.jsonl"
        save_corpus(corpus, out)
        again = load_corpus(out)
        assert [(s.id, s.title, s.raw_text, s.text, s.label) for s in corpus] \
            == [(s.id, s.title, s.raw_text, s.text, s.label) for s in again]

    _criterion(9, "corpus statistics (dataset branch) or sample-corpus "
                  "schema and round-trip", run)

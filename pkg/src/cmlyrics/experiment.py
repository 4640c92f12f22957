"""Cross-validated evaluation harness over the ten model configurations.

Per fold everything learnable (vocab, embeddings, feature scaler, model
parameters) is fit on that fold's train split; dev is used only for the
neural models' epoch selection. Tagging with the language-ID CRF happens
once per song (cached by text hash) since song labels play no role in it.
"""

import hashlib
from dataclasses import dataclass, field, replace

from . import classic, neural
from .cmfeatures import extract_code_mixed_features, fit_scaler, scale
from .corpus import load_corpus, make_folds
from .embeddings import EmbeddingConfig, train_embeddings
from .langid import LangResources, load_model as load_crf, tag_song
from .textproc import word_tokens

MODEL_SPECS = {
    "nb": (1, "Naive Bayes"),
    "nb_cm": (2, "Naive Bayes with code-mixed features"),
    "svm": (3, "SVM"),
    "svm_cm": (4, "SVM with code-mixed features"),
    "cnn": (5, "CNN"),
    "cnn_cm": (6, "CNN with code-mixed features"),
    "lstm": (7, "LSTM"),
    "lstm_cm": (8, "LSTM with code-mixed features"),
    "cmnn": (9, "CMNN"),
    "cmnn_cm": (10, "CMNN with code-mixed features"),
}
ALL_MODELS = tuple(MODEL_SPECS)


@dataclass
class ExperimentConfig:
    corpus_path: str = ""
    langid_model_path: str = ""
    lexicon_path: str | None = None
    postpos_path: str | None = None
    k: int = 5
    seed: int = 42
    models: tuple = ALL_MODELS
    # classical hyperparameters
    min_count: int = 2
    nb_alpha: float = 1.0
    svm_lambda: float = 1e-4
    svm_epochs: int = 20
    # embeddings / neural hyperparameters
    emb_dim: int = 100
    emb_window: int = 5
    emb_negatives: int = 5
    emb_epochs: int = 5
    epochs: int = 10
    batch_size: int = 32
    learning_rate: float = 0.05
    clip_norm: float = 5.0
    n_filters: int = 64
    hidden_size: int = 64
    fusion_size: int = 32
    activation: str = "relu"


@dataclass
class ResultRow:
    model_id: int
    model_name: str
    fold_accuracies: list
    mean_accuracy: float = field(init=False)

    def __post_init__(self):
        self.mean_accuracy = sum(self.fold_accuracies) / len(self.fold_accuracies)


def accuracy(pred, gold):
    if len(pred) != len(gold):
        raise ValueError(f"length mismatch: {len(pred)} vs {len(gold)}")
    if not pred:
        raise ValueError("empty prediction list")
    return sum(1 for p, g in zip(pred, gold) if p == g) / len(pred)


def _tag_corpus(corpus, crf, res):
    tagged = {}
    cache = {}
    for song in corpus:
        key = hashlib.sha256(song.text.encode("utf-8")).hexdigest()
        if key not in cache:
            cache[key] = tag_song(crf, song, res)
        tagged[song.id] = cache[key]
    return tagged


def run_experiment(cfg, corpus=None, crf=None, res=None, return_details=False):
    """Run the selected models over k folds; returns ResultRows sorted by
    model id (plus per-fold artifacts when return_details is set)."""
    for key in cfg.models:
        if key not in MODEL_SPECS:
            raise ValueError(f"unknown model key {key!r}")
    if not cfg.models:
        raise ValueError("no models selected")
    if corpus is None:
        corpus = load_corpus(cfg.corpus_path)
    for song in corpus:
        if song.label is None:
            raise ValueError(f"song {song.id!r} is unlabeled")
        if not word_tokens(song.text):
            raise ValueError(f"song {song.id!r} has no word tokens")
    if res is None:
        res = LangResources.load(cfg.lexicon_path, cfg.postpos_path)
    if crf is None:
        crf = load_crf(cfg.langid_model_path)

    tagged = _tag_corpus(corpus, crf, res)
    cm_raw = {sid: extract_code_mixed_features(ts) for sid, ts in tagged.items()}
    tokens = {s.id: word_tokens(s.text) for s in corpus}
    by_id = {s.id: s for s in corpus}

    folds = make_folds(corpus, cfg.k, cfg.seed)
    fold_acc = {key: [] for key in cfg.models}
    details = []
    need_neural = any(k in cfg.models for k in
                      ("cnn", "cnn_cm", "lstm", "lstm_cm", "cmnn", "cmnn_cm"))
    for fold in folds:
        fold_seed = cfg.seed + fold.fold_index
        train_songs = [by_id[i] for i in fold.train]
        dev_songs = [by_id[i] for i in fold.dev]
        test_songs = [by_id[i] for i in fold.test]
        art = {"fold": fold.fold_index}

        vocab = classic.build_vocab(train_songs, min_count=cfg.min_count)
        vecs = {s.id: classic.tfidf(vocab, s) for s in corpus}
        scaler = fit_scaler([cm_raw[i] for i in fold.train])
        cm_scaled = {sid: scale(scaler, f) for sid, f in cm_raw.items()}
        art["vocab"] = vocab
        art["scaler"] = scaler

        train_labels = [by_id[i].label for i in fold.train]
        test_labels = [by_id[i].label for i in fold.test]

        table = None
        if need_neural:
            table = train_embeddings(train_songs, EmbeddingConfig(
                d=cfg.emb_dim, window=cfg.emb_window,
                negatives=cfg.emb_negatives, epochs=cfg.emb_epochs,
                min_count=cfg.min_count, seed=fold_seed))
            art["embeddings"] = table

        for key in cfg.models:
            use_cm = key.endswith("_cm")
            base = key[:-3] if use_cm else key
            if base == "nb":
                model = classic.train_nb(
                    [vecs[i] for i in fold.train], train_labels, len(vocab),
                    cm=[cm_raw[i] for i in fold.train] if use_cm else None,
                    alpha=cfg.nb_alpha)
                preds = [classic.predict_nb(model, vecs[i],
                                            cm_raw[i] if use_cm else None)[0]
                         for i in fold.test]
            elif base == "svm":
                model = classic.train_svm(
                    [vecs[i] for i in fold.train], train_labels, len(vocab),
                    cm=[cm_scaled[i] for i in fold.train] if use_cm else None,
                    cfg=classic.SvmTrainConfig(lambda_=cfg.svm_lambda,
                                               epochs=cfg.svm_epochs,
                                               seed=fold_seed))
                preds = [classic.predict_svm(model, vecs[i],
                                             cm_scaled[i] if use_cm else None)
                         for i in fold.test]
            else:
                def rows(ids):
                    return [(tokens[i], cm_scaled[i] if use_cm else None,
                             by_id[i].label) for i in ids]
                model = neural.train_model(
                    base, use_cm, rows(fold.train), rows(fold.dev), table,
                    cfg=neural.TrainConfig(
                        epochs=cfg.epochs, batch_size=cfg.batch_size,
                        learning_rate=cfg.learning_rate, seed=fold_seed,
                        clip_norm=cfg.clip_norm),
                    n_filters=cfg.n_filters, hidden_size=cfg.hidden_size,
                    fusion_size=cfg.fusion_size, activation=cfg.activation)
                preds = [neural.predict(
                    model, neural.pad_sequence(tokens[i], model.max_len, model),
                    cm_scaled[i] if use_cm else None) for i in fold.test]
            fold_acc[key].append(accuracy(preds, test_labels))
            art[key] = model
        details.append(art)

    rows = [ResultRow(model_id=MODEL_SPECS[key][0], model_name=MODEL_SPECS[key][1],
                      fold_accuracies=fold_acc[key])
            for key in cfg.models]
    rows.sort(key=lambda r: r.model_id)
    if return_details:
        return rows, details
    return rows


def render_report(rows, fmt="table"):
    if not rows:
        raise ValueError("no result rows")
    k = len(rows[0].fold_accuracies)
    if fmt == "csv":
        lines = ["id,model," + ",".join(f"fold_{i}" for i in range(k)) + ",mean"]
        for r in rows:
            accs = ",".join(f"{a:.4f}" for a in r.fold_accuracies)
            lines.append(f"{r.model_id},{r.model_name},{accs},{r.mean_accuracy:.4f}")
        return "\n".join(lines) + "\n"
    if fmt == "table":
        width = max(len(r.model_name) for r in rows)
        lines = [f"{'ID':<3} {'Model':<{width}} Accuracy"]
        for r in rows:
            lines.append(f"{r.model_id:<3} {r.model_name:<{width}} "
                         f"{100.0 * r.mean_accuracy:.2f}%")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format {fmt!r}")


def parse_report_csv(text):
    """Inverse of render_report(..., "csv") to 4 decimals."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        rows.append(ResultRow(model_id=int(parts[0]), model_name=parts[1],
                              fold_accuracies=[float(x) for x in parts[2:-1]]))
    return rows


def load_experiment_config(path, overrides=None):
    """Flat key=value config file; unknown keys are rejected. overrides is a
    dict applied on top (CLI flags)."""
    cfg = ExperimentConfig()
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    values.update(overrides or {})
    return apply_config_values(cfg, values)


def apply_config_values(cfg, values):
    mapping = {"corpus": "corpus_path", "langid_model": "langid_model_path",
               "lexicon": "lexicon_path", "postpositions": "postpos_path"}
    for key, val in values.items():
        attr = mapping.get(key, key)
        if not hasattr(cfg, attr):
            raise ValueError(f"unknown config key {key!r}")
        current = getattr(cfg, attr)
        if attr == "models":
            val = tuple(v.strip() for v in val.split(",")) if isinstance(val, str) else tuple(val)
        elif isinstance(current, bool):
            val = val in ("1", "true", "yes")
        elif isinstance(current, int):
            val = int(val)
        elif isinstance(current, float):
            val = float(val)
        cfg = replace(cfg, **{attr: val})
    return cfg

"""Command-line entry point.

Subcommands: clean, tag-train, tag, cm-features, embed-train, train,
evaluate, report, kappa. Exit codes: 0 success, 1 usage error, 2 data or
model error. Errors go to stderr as "error: <category>: <detail>".
"""

import argparse
import sys

import numpy as np

from . import classic, neural
from .cmfeatures import extract_code_mixed_features, fit_scaler, scale
from .corpus import Corpus, Song, cohen_kappa, load_corpus, \
    make_folds, save_corpus, CorpusError
from .embeddings import EmbeddingConfig, save_embeddings, \
    train_embeddings_with_losses
from .langid import CrfTrainConfig, LangResources, read_tagged, \
    save_model as save_crf, load_model as load_crf, tag_accuracy, tag_song, \
    train_crf
from .experiment import ExperimentConfig, apply_config_values, \
    load_experiment_config, parse_report_csv, render_report, run_experiment
from .textproc import word_tokens


def _write_out(text, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _resources(args):
    return LangResources.load(getattr(args, "lexicon", None),
                              getattr(args, "postpositions", None))


def cmd_clean(args):
    corpus = load_corpus(args.input)
    cleaned = Corpus([Song(id=s.id, title=s.title, raw_text=s.text,
                           text=s.text, label=s.label) for s in corpus])
    save_corpus(cleaned, args.output)
    print(f"cleaned {len(cleaned)} songs -> {args.output}")
    return 0


def cmd_tag_train(args):
    data = read_tagged(args.tagged)
    res = _resources(args)
    if args.dev:
        train, heldout = data, read_tagged(args.dev)
    else:
        rng = np.random.Generator(np.random.PCG64(args.seed))
        order = rng.permutation(len(data))
        n_held = max(1, int(len(data) * 0.1))
        heldout = [data[i] for i in order[:n_held]]
        train = [data[i] for i in order[n_held:]]
    cfg = CrfTrainConfig(l2=args.l2, epochs=args.epochs,
                         learning_rate=args.learning_rate, seed=args.seed)
    model = train_crf(train, res, cfg, dev=heldout)
    save_crf(model, args.out)
    acc = tag_accuracy(model, heldout, res)
    print(f"held-out tag accuracy: {acc:.4f}")
    return 0


def cmd_tag(args):
    corpus = load_corpus(args.corpus)
    model = load_crf(args.model)
    res = _resources(args)
    lines = []
    for song in corpus:
        lines.append(f"# song {song.id}")
        for ts in tag_song(model, song, res):
            for tok, tag in zip(ts.tokens, ts.tags):
                lines.append(f"{tok.surface}\t{tag}")
            lines.append("")
    _write_out("\n".join(lines) + "\n", args.out)
    return 0


def cmd_cm_features(args):
    corpus = load_corpus(args.corpus)
    model = load_crf(args.model)
    res = _resources(args)
    lines = []
    for song in corpus:
        f = extract_code_mixed_features(tag_song(model, song, res))
        lines.append(f"{song.id}\t{f.s1}\t{f.s2:.4f}\t{f.s3}\t{f.s4:.4f}")
    _write_out("\n".join(lines) + "\n", args.out)
    return 0


def cmd_embed_train(args):
    corpus = load_corpus(args.corpus)
    cfg = EmbeddingConfig(d=args.dim, window=args.window,
                          negatives=args.negatives, epochs=args.epochs,
                          min_count=args.min_count, seed=args.seed)
    table, losses = train_embeddings_with_losses(list(corpus), cfg)
    save_embeddings(table, args.out)
    for i, loss in enumerate(losses):
        print(f"epoch {i}: mean loss {loss:.4f}")
    print(f"saved {len(table)} x {table.d} embeddings -> {args.out}")
    return 0


def cmd_train(args):
    cfg = _experiment_config(args)
    cfg = apply_config_values(cfg, {"models": args.model})
    corpus = load_corpus(cfg.corpus_path)
    folds = make_folds(corpus, cfg.k, cfg.seed)
    fold = folds[args.fold]
    res = LangResources.load(cfg.lexicon_path, cfg.postpos_path)
    crf = load_crf(cfg.langid_model_path)
    by_id = {s.id: s for s in corpus}
    key = args.model
    use_cm = key.endswith("_cm")
    base = key[:-3] if use_cm else key
    tagged = {s.id: tag_song(crf, s, res) for s in corpus}
    cm_raw = {sid: extract_code_mixed_features(ts) for sid, ts in tagged.items()}
    scaler = fit_scaler([cm_raw[i] for i in fold.train])
    cm_scaled = {sid: scale(scaler, f) for sid, f in cm_raw.items()}
    train_songs = [by_id[i] for i in fold.train]
    labels = [by_id[i].label for i in fold.train]
    vocab = classic.build_vocab(train_songs, min_count=cfg.min_count)
    vecs = {s.id: classic.tfidf(vocab, s) for s in corpus}
    if base == "nb":
        model = classic.train_nb([vecs[i] for i in fold.train], labels, len(vocab),
                                 cm=[cm_raw[i] for i in fold.train] if use_cm else None,
                                 alpha=cfg.nb_alpha)
        classic.save_nb(model, args.out)
        preds = [classic.predict_nb(model, vecs[i], cm_raw[i] if use_cm else None)[0]
                 for i in fold.test]
    elif base == "svm":
        model = classic.train_svm([vecs[i] for i in fold.train], labels, len(vocab),
                                  cm=[cm_scaled[i] for i in fold.train] if use_cm else None,
                                  cfg=classic.SvmTrainConfig(lambda_=cfg.svm_lambda,
                                                             epochs=cfg.svm_epochs,
                                                             seed=cfg.seed))
        classic.save_svm(model, args.out)
        preds = [classic.predict_svm(model, vecs[i], cm_scaled[i] if use_cm else None)
                 for i in fold.test]
    else:
        table = train_embeddings_with_losses(train_songs, EmbeddingConfig(
            d=cfg.emb_dim, window=cfg.emb_window, negatives=cfg.emb_negatives,
            epochs=cfg.emb_epochs, min_count=cfg.min_count, seed=cfg.seed))[0]
        toks = {s.id: word_tokens(s.text) for s in corpus}

        def rows(ids):
            return [(toks[i], cm_scaled[i] if use_cm else None, by_id[i].label)
                    for i in ids]
        model = neural.train_model(base, use_cm, rows(fold.train), rows(fold.dev),
                                   table,
                                   cfg=neural.TrainConfig(
                                       epochs=cfg.epochs, batch_size=cfg.batch_size,
                                       learning_rate=cfg.learning_rate,
                                       seed=cfg.seed, clip_norm=cfg.clip_norm),
                                   n_filters=cfg.n_filters, hidden_size=cfg.hidden_size,
                                   fusion_size=cfg.fusion_size, activation=cfg.activation)
        neural.save_model(model, args.out)
        preds = [neural.predict(model, neural.pad_sequence(toks[i], model.max_len, model),
                                cm_scaled[i] if use_cm else None) for i in fold.test]
    gold = [by_id[i].label for i in fold.test]
    acc = sum(1 for p, g in zip(preds, gold) if p == g) / len(gold)
    print(f"fold {args.fold} test accuracy: {acc:.4f}")
    print(f"saved model -> {args.out}")
    return 0


def _experiment_config(args):
    overrides = {}
    for key in ("corpus", "langid_model", "k", "seed", "models"):
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            overrides[key] = val
    if args.config:
        return load_experiment_config(args.config, overrides)
    return apply_config_values(ExperimentConfig(), overrides)


def cmd_evaluate(args):
    cfg = _experiment_config(args)
    rows = run_experiment(cfg)
    _write_out(render_report(rows, args.format), args.out)
    return 0


def cmd_report(args):
    with open(args.input, encoding="utf-8") as fh:
        rows = parse_report_csv(fh.read())
    _write_out(render_report(rows, args.format), args.out)
    return 0


def _read_labels(path):
    with open(path, encoding="utf-8") as fh:
        return [ln.strip() for ln in fh if ln.strip()]


def cmd_kappa(args):
    kappa = cohen_kappa(_read_labels(args.a), _read_labels(args.b))
    print(f"{kappa:.4f}")
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: usage: {message}\n")
        raise SystemExit(1)


def _add_resource_flags(p):
    p.add_argument("--lexicon", help="English word list (default: shipped)")
    p.add_argument("--postpositions", help="Telugu postposition list (default: shipped)")


def build_parser():
    parser = _Parser(prog="cmlyrics",
                     description="Code-mixed Telugu-English lyric arousal toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("clean", help="clean raw lyrics into a corpus file")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("tag-train", help="train the language-ID CRF")
    p.add_argument("tagged", help="tagged data (surface<TAB>tag lines)")
    p.add_argument("--out", required=True)
    p.add_argument("--dev", help="held-out tagged file (default: 10%% split)")
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--l2", type=float, default=1e-4)
    p.add_argument("--learning-rate", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=42)
    _add_resource_flags(p)
    p.set_defaults(func=cmd_tag_train)

    p = sub.add_parser("tag", help="tag a corpus with a CRF model")
    p.add_argument("corpus")
    p.add_argument("model")
    p.add_argument("--out")
    _add_resource_flags(p)
    p.set_defaults(func=cmd_tag)

    p = sub.add_parser("cm-features", help="dump the four code-mix features per song")
    p.add_argument("corpus")
    p.add_argument("model")
    p.add_argument("--out")
    _add_resource_flags(p)
    p.set_defaults(func=cmd_cm_features)

    p = sub.add_parser("embed-train", help="train skip-gram embeddings")
    p.add_argument("corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--dim", type=int, default=100)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--min-count", type=int, default=2)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_embed_train)

    p = sub.add_parser("train", help="train one model on one fold")
    p.add_argument("--model", required=True,
                   help="nb, nb_cm, svm, svm_cm, cnn, cnn_cm, lstm, lstm_cm, cmnn, cmnn_cm")
    p.add_argument("--out", required=True)
    p.add_argument("--config")
    p.add_argument("--corpus")
    p.add_argument("--langid-model")
    p.add_argument("--fold", type=int, default=0)
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="run the cross-validated experiment")
    p.add_argument("--config")
    p.add_argument("--corpus")
    p.add_argument("--langid-model")
    p.add_argument("--models", help="comma-separated model keys")
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--format", choices=("csv", "table"), default="table")
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="re-render a saved csv report")
    p.add_argument("input")
    p.add_argument("--format", choices=("csv", "table"), default="table")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("kappa", help="Cohen's kappa of two annotation files")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_kappa)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (CorpusError,) as e:
        sys.stderr.write(f"error: data: {e}\n")
        return 2
    except FileNotFoundError as e:
        sys.stderr.write(f"error: io: {e}\n")
        return 2
    except (ValueError, FloatingPointError, KeyError, IndexError) as e:
        sys.stderr.write(f"error: model: {e}\n")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

"""Subcommand front-end for the hypernym-discovery pipeline.

Stages persist their artifacts as files so late stages can be re-run
without re-scanning the corpus:

    normalize        tagged corpus -> normalized corpus
    extract-hearst   tagged corpus -> Hearst pattern corpus
    extract-isa      tagged corpus -> IS-A pattern corpus
    train-embedding  normalized corpus -> embedding file (requires a seed)
    cooc-index       normalized corpus + queries -> co-occurrence snapshot
    fit-phi          embedding + training queries/gold -> projection file
    predict          all four evidence sources -> merged predictions
    evaluate         predictions + gold -> metric table and report file
    pipeline         all of the above, in order

Configuration is a flat ``key=value`` file; every key can be overridden
with a ``--key value`` flag. Each artifact is stamped with a hash of the
resolved configuration and stages refuse to consume artifacts whose stamp
does not match, so artifacts from different configurations cannot be
composed by accident. ``--workers 1`` (the default) makes every stage,
and therefore the whole pipeline, byte-for-byte reproducible.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from dataclasses import dataclass, fields

from .cooc import (
    Source,
    build_cooc_index,
    build_pair_index,
    candidates_from_cooc,
    candidates_from_pairs,
    head_word_heuristic,
    load_cooc_index,
    save_cooc_index,
)
from .corpus_io import (
    FormatError,
    Query,
    QueryKind,
    load_gold,
    load_queries,
    load_vocabulary,
    read_header,
    read_predictions,
    term_to_token,
    write_predictions,
)
from .embedding import (
    EmbeddingConfig,
    PhiMode,
    candidates_from_phi,
    fit_phi,
    load_embedding,
    load_phi,
    save_embedding,
    save_phi,
    train_cbow,
)
from .metrics import evaluate, format_table, write_report
from .normalize import normalize_corpus
from .patterns import extract_corpus
from .rank import ModuleOrder, RankedPrediction, choose_order, merge

CONFIG_HASH_KEY = "config-hash"


class CliError(Exception):
    pass


@dataclass
class PipelineConfig:
    # inputs
    corpus: str = ""
    vocab: str = ""
    queries: str = ""
    gold: str = ""
    train_queries: str = ""
    train_gold: str = ""
    # artifacts
    normalized: str = "normalized.txt"
    hearst_corpus: str = "hearst_corpus.tsv"
    isa_corpus: str = "isa_corpus.tsv"
    cooc_index: str = "cooc_index.tsv"
    embedding: str = "embedding.txt"
    phi: str = "phi.txt"
    predictions: str = "predictions.tsv"
    metrics: str = "metrics.tsv"
    # parameters
    threshold: int = 5
    k: int = 15
    dim: int = 300
    window: int = 10
    min_count: int = 5
    negatives: int = 5
    epochs: int = 5
    lr: float = 0.025
    seed: int | None = None
    phi_mode: str = "offset"
    ridge: float = 1e-6
    order_mode: str = "fixed"
    p_at_normalized: bool = False
    workers: int = 1

    def __post_init__(self) -> None:
        if not 1 <= self.k <= 15:
            raise CliError(f"k must be between 1 and 15, got {self.k}")
        if self.phi_mode not in ("offset", "matrix"):
            raise CliError(f"phi_mode must be 'offset' or 'matrix', got {self.phi_mode!r}")
        if self.order_mode not in ("fixed", "trained"):
            raise CliError(f"order_mode must be 'fixed' or 'trained', got {self.order_mode!r}")
        if self.workers < 1:
            raise CliError("workers must be at least 1")

    def serialize(self) -> str:
        parts = []
        for f in sorted(fields(self), key=lambda f: f.name):
            value = getattr(self, f.name)
            parts.append(f"{f.name}={'' if value is None else value}")
        return "\n".join(parts) + "\n"

    def hash(self) -> str:
        return hashlib.sha256(self.serialize().encode("utf-8")).hexdigest()[:12]

    def header(self) -> dict[str, str]:
        return {CONFIG_HASH_KEY: self.hash()}


_FIELD_TYPES = {f.name: f.type for f in fields(PipelineConfig)}


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _coerce(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    raw = raw.strip()
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if kind == "bool":
        return _parse_bool(raw)
    if kind == "int | None":
        return int(raw) if raw else None
    return raw


def load_config(
    path: str | None = None, overrides: dict[str, object] | None = None
) -> PipelineConfig:
    """Read a ``key=value`` config file and apply flag overrides on top."""
    values: dict[str, object] = {}
    if path:
        if not os.path.exists(path):
            raise CliError(f"config file not found: {path}")
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, sep, raw = line.partition("=")
                key = key.strip()
                if not sep or key not in _FIELD_TYPES:
                    raise CliError(f"{path}: line {lineno}: unknown config key {key!r}")
                try:
                    values[key] = _coerce(key, raw)
                except ValueError as exc:
                    raise CliError(f"{path}: line {lineno}: {exc}") from None
    if overrides:
        values.update(overrides)
    return PipelineConfig(**values)


def write_config(path: str | os.PathLike, cfg: PipelineConfig) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(cfg.serialize())


# ---------------------------------------------------------------------------
# stage plumbing


def _require_input(path: str, key: str) -> None:
    if not path:
        raise CliError(f"config key '{key}' is required for this stage")
    if not os.path.exists(path):
        raise CliError(f"input file for '{key}' not found: {path}")


def _require_artifact(cfg: PipelineConfig, path: str, stage: str) -> None:
    if not path or not os.path.exists(path):
        raise CliError(
            f"missing artifact {path!r}: run the '{stage}' stage first"
        )
    stamped = read_header(path).get(CONFIG_HASH_KEY)
    if stamped is not None and stamped != cfg.hash():
        raise CliError(
            f"stale artifact {path!r}: built with config-hash {stamped}, current "
            f"config is {cfg.hash()}; re-run the '{stage}' stage"
        )


def cmd_normalize(cfg: PipelineConfig) -> None:
    _require_input(cfg.corpus, "corpus")
    stats = normalize_corpus(
        cfg.corpus, cfg.normalized, workers=cfg.workers, header=cfg.header()
    )
    print(
        f"normalize: {stats.paragraphs_in} paragraphs in, "
        f"{stats.paragraphs_out} out, {stats.phrases_appended} phrases appended"
    )


def cmd_extract_hearst(cfg: PipelineConfig) -> None:
    _require_input(cfg.corpus, "corpus")
    stats = extract_corpus(
        cfg.corpus, hearst_out=cfg.hearst_corpus, workers=cfg.workers, header=cfg.header()
    )
    print(f"extract-hearst: {stats.hearst_matches} matches")


def cmd_extract_isa(cfg: PipelineConfig) -> None:
    _require_input(cfg.corpus, "corpus")
    stats = extract_corpus(
        cfg.corpus, isa_out=cfg.isa_corpus, workers=cfg.workers, header=cfg.header()
    )
    print(f"extract-isa: {stats.isa_matches} matches")


def cmd_train_embedding(cfg: PipelineConfig) -> None:
    if cfg.seed is None:
        raise CliError("train-embedding requires a seed (--seed or seed= in the config)")
    _require_artifact(cfg, cfg.normalized, "normalize")
    config = EmbeddingConfig(
        dimension=cfg.dim,
        window=cfg.window,
        min_count=cfg.min_count,
        negatives=cfg.negatives,
        epochs=cfg.epochs,
        learning_rate=cfg.lr,
        seed=cfg.seed,
    )
    model = train_cbow(cfg.normalized, config, workers=cfg.workers)
    save_embedding(cfg.embedding, model, header=cfg.header())
    print(f"train-embedding: {len(model.vocab)} tokens, dimension {model.dimension}")


def _query_tokens(cfg: PipelineConfig) -> set[str]:
    tokens = {term_to_token(q.term) for q in load_queries(cfg.queries)}
    if cfg.train_queries and os.path.exists(cfg.train_queries):
        tokens |= {term_to_token(q.term) for q in load_queries(cfg.train_queries)}
    return tokens


def cmd_cooc_index(cfg: PipelineConfig) -> None:
    _require_artifact(cfg, cfg.normalized, "normalize")
    _require_input(cfg.queries, "queries")
    index = build_cooc_index(cfg.normalized, _query_tokens(cfg), workers=cfg.workers)
    save_cooc_index(cfg.cooc_index, index, header=cfg.header())
    n_rows = sum(len(row) for row in index.counts.values())
    print(f"cooc-index: {len(index.counts)} query terms, {n_rows} candidate counts")


def cmd_fit_phi(cfg: PipelineConfig) -> None:
    _require_artifact(cfg, cfg.embedding, "train-embedding")
    _require_input(cfg.train_queries, "train_queries")
    _require_input(cfg.train_gold, "train_gold")
    train_queries = load_queries(cfg.train_queries)
    train_gold = load_gold(cfg.train_gold, train_queries)
    pairs = [
        (gold_set.query.term, hypernym)
        for gold_set in train_gold
        for hypernym in gold_set.hypernyms
    ]
    model = load_embedding(cfg.embedding)
    phi = fit_phi(pairs, model, PhiMode(cfg.phi_mode), ridge=cfg.ridge)
    save_phi(cfg.phi, phi, header=cfg.header())
    print(
        f"fit-phi: {cfg.phi_mode} mode from {len(pairs) - phi.skipped_pairs} pairs "
        f"({phi.skipped_pairs} skipped out-of-vocabulary)"
    )


def _source_lists(query, vocab, cooc_idx, hearst_idx, isa_idx, model, phi, cfg):
    isa = candidates_from_pairs(isa_idx, query.term, vocab, cfg.k)
    head = head_word_heuristic(query)
    if (
        head is not None
        and (vocab is None or head.term in vocab)
        and head.term not in {c.term for c in isa}
    ):
        isa = (isa + [head])[: cfg.k]
    return {
        Source.ISA: isa,
        Source.COOC: candidates_from_cooc(
            cooc_idx, query.term, vocab, cfg.threshold, cfg.k
        ),
        Source.HEARST: candidates_from_pairs(hearst_idx, query.term, vocab, cfg.k),
        Source.PHI: candidates_from_phi(phi, model, query.term, vocab, cfg.k),
    }


def cmd_predict(cfg: PipelineConfig) -> None:
    _require_input(cfg.vocab, "vocab")
    _require_input(cfg.queries, "queries")
    _require_artifact(cfg, cfg.cooc_index, "cooc-index")
    _require_artifact(cfg, cfg.hearst_corpus, "extract-hearst")
    _require_artifact(cfg, cfg.isa_corpus, "extract-isa")
    _require_artifact(cfg, cfg.embedding, "train-embedding")
    _require_artifact(cfg, cfg.phi, "fit-phi")
    vocab = load_vocabulary(cfg.vocab)
    queries = load_queries(cfg.queries)
    cooc_idx = load_cooc_index(cfg.cooc_index)
    hearst_idx = build_pair_index(cfg.hearst_corpus, Source.HEARST)
    isa_idx = build_pair_index(cfg.isa_corpus, Source.ISA)
    model = load_embedding(cfg.embedding)
    phi = load_phi(cfg.phi)

    def lists_for(query: Query):
        return _source_lists(
            query, vocab, cooc_idx, hearst_idx, isa_idx, model, phi, cfg
        )

    if cfg.order_mode == "trained":
        _require_input(cfg.train_queries, "train_queries")
        _require_input(cfg.train_gold, "train_gold")
        train_queries = load_queries(cfg.train_queries)
        train_gold = load_gold(cfg.train_gold, train_queries)
        train_lists = [lists_for(q) for q in train_queries]
        per_source = {
            source: [
                RankedPrediction(q, tuple(lists[source]))
                for q, lists in zip(train_queries, train_lists)
            ]
            for source in Source
        }
        order = choose_order(per_source, train_gold)
    else:
        order = ModuleOrder()
    predictions = [merge(q, lists_for(q), order, cfg.k) for q in queries]
    write_predictions(
        cfg.predictions, (p.terms() for p in predictions), header=cfg.header()
    )
    order_text = " > ".join(s.value for s in order.order)
    print(f"predict: {len(predictions)} queries, module order {order_text}")


def cmd_evaluate(cfg: PipelineConfig) -> None:
    _require_input(cfg.queries, "queries")
    _require_input(cfg.gold, "gold")
    _require_artifact(cfg, cfg.predictions, "predict")
    queries = load_queries(cfg.queries)
    gold_sets = load_gold(cfg.gold, queries)
    rows = read_predictions(cfg.predictions)
    if len(rows) != len(queries):
        raise CliError(
            f"{cfg.predictions}: {len(rows)} prediction lines for {len(queries)} queries"
        )
    reports = [
        evaluate(rows, gold_sets, None, cfg.p_at_normalized),
        evaluate(rows, gold_sets, QueryKind.CONCEPT, cfg.p_at_normalized),
        evaluate(rows, gold_sets, QueryKind.ENTITY, cfg.p_at_normalized),
    ]
    print(format_table(reports))
    if cfg.metrics:
        write_report(cfg.metrics, reports, header=cfg.header())


PIPELINE_STAGES = [
    ("normalize", cmd_normalize),
    ("extract-hearst", cmd_extract_hearst),
    ("extract-isa", cmd_extract_isa),
    ("train-embedding", cmd_train_embedding),
    ("cooc-index", cmd_cooc_index),
    ("fit-phi", cmd_fit_phi),
    ("predict", cmd_predict),
    ("evaluate", cmd_evaluate),
]


def cmd_pipeline(cfg: PipelineConfig) -> None:
    for _, handler in PIPELINE_STAGES:
        handler(cfg)


COMMANDS = dict(PIPELINE_STAGES) | {"pipeline": cmd_pipeline}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperdisc",
        description="Hypernym discovery over a POS-tagged corpus.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub = subparsers.add_parser(name, help=f"run the {name} stage")
        sub.add_argument("--config", help="key=value configuration file")
        for f in fields(PipelineConfig):
            flag = "--" + f.name.replace("_", "-")
            sub.add_argument(flag, dest=f.name, default=argparse.SUPPRESS, metavar="V")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    raw = vars(args)
    command = raw.pop("command")
    config_path = raw.pop("config", None)
    try:
        overrides = {key: _coerce(key, str(value)) for key, value in raw.items()}
        cfg = load_config(config_path, overrides)
        COMMANDS[command](cfg)
    except (CliError, FormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

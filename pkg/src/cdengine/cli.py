"""Batch CLI: subcommands over a corpus, TSV outputs, and a JSON run manifest.

Exit codes: 0 success, 1 usage error, 2 data error. Every output file carries
a comment header with the command, a hash of the resolved configuration, and
the seed; identical configurations produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import os
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__, corpus as corpus_mod, knowledge, nullmodel, stats, text, tsvio
from .disruption import (
    DisruptionConfig,
    JRule,
    batch_cd,
    bucket_conservation,
    di_variants,
)
from .errors import DataError
from .normalize import FIELD_YEAR, PAPER, NormalizationContext, normalized_values

SUBCOMMANDS = ("ingest", "validate", "cd", "normalize", "null", "atypical",
               "knowledge", "text", "buckets", "regress", "shapley", "report")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep usage problems on exit code 1
        raise UsageError(message)


def _add_corpus_flags(p: _Parser) -> None:
    p.add_argument("--nodes", required=True,
                   help="nodes file (TSV or JSON lines), or a CDC1 corpus cache")
    p.add_argument("--edges", help="edges TSV (citing_id, cited_id)")
    p.add_argument("--taxonomy", help="field_sub -> field_area TSV")


def _add_out_flags(p: _Parser) -> None:
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None,
                   help="worker count for parallel sections (default: all cores)")


def _add_cd_flags(p: _Parser) -> None:
    p.add_argument("--window", default="5",
                   help="forward window in years, or 'all' for up to the horizon")
    p.add_argument("--include-same-year", action=argparse.BooleanOptionalAction,
                   default=True, help="count same-year citers (default: yes)")
    p.add_argument("--j-rule", default="1",
                   help="integer L for the at-least-L rule, or 'all'")
    p.add_argument("--no-k", action="store_true",
                   help="drop the k class from the denominator")
    p.add_argument("--horizon", type=int, default=None,
                   help="last citing year for the unbounded window (default: corpus max)")


def _add_null_flags(p: _Parser) -> None:
    p.add_argument("--replicas", type=int, default=10)
    p.add_argument("--swap-multiplier", type=int, default=100)
    p.add_argument("--subsample", type=float, default=1.0,
                   help="focal-document subsample fraction in (0, 1]")


def build_parser() -> _Parser:
    parser = _Parser(prog="cdengine",
                     description="Citation-network disruption analytics.")
    sub = parser.add_subparsers(dest="command", metavar="|".join(SUBCOMMANDS))

    p = sub.add_parser("ingest", help="build a corpus, cache it, emit validation and field-year tables")
    _add_corpus_flags(p)
    _add_out_flags(p)

    p = sub.add_parser("validate", help="ingest and report data anomalies")
    _add_corpus_flags(p)
    _add_out_flags(p)

    p = sub.add_parser("cd", help="disruption scores per document")
    _add_corpus_flags(p)
    _add_out_flags(p)
    _add_cd_flags(p)
    p.add_argument("--variants", action="store_true",
                   help="also emit the no-k and all-references variants")

    p = sub.add_parser("normalize", help="nk-attenuated disruption variants")
    _add_corpus_flags(p)
    _add_out_flags(p)
    _add_cd_flags(p)
    p.add_argument("--normalize", choices=("paper", "fy"),
                   help="emit only one normalization (default: both)")
    p.add_argument("--field-level", choices=("area", "sub"), default="area")

    p = sub.add_parser("null", help="z-scores against rewired replicas")
    _add_corpus_flags(p)
    _add_out_flags(p)
    _add_cd_flags(p)
    _add_null_flags(p)

    p = sub.add_parser("atypical", help="cited-key pair novelty versus rewired replicas")
    _add_corpus_flags(p)
    _add_out_flags(p)
    _add_null_flags(p)
    p.add_argument("--pair-key", choices=("venue", "class_code"), default="venue")

    p = sub.add_parser("knowledge", help="knowledge-use metrics")
    _add_corpus_flags(p)
    _add_out_flags(p)
    p.add_argument("--field-level", choices=("area", "sub"), default="sub")
    p.add_argument("--embeddings", help="word embedding table for title vectors")

    p = sub.add_parser("text", help="lexical metrics over titles or abstracts")
    _add_corpus_flags(p)
    _add_out_flags(p)
    p.add_argument("--scope", choices=("title", "abstract"), default="title")
    p.add_argument("--field-level", choices=("area", "sub"), default="area")
    p.add_argument("--stopwords", help="stopword list (default: packaged list)")
    p.add_argument("--pos-lexicon", help="lemma<TAB>pos table; enables the verb table")

    p = sub.add_parser("buckets", help="yearly counts over positive score intervals")
    _add_corpus_flags(p)
    _add_out_flags(p)
    _add_cd_flags(p)

    p = sub.add_parser("regress", help="OLS fit of a TSV emitted by other commands")
    p.add_argument("data", help="input TSV")
    p.add_argument("--spec", required=True, help="regression spec JSON")
    _add_out_flags(p)

    p = sub.add_parser("shapley", help="fit decomposition across predictor groups")
    p.add_argument("data", help="input TSV")
    p.add_argument("--spec", required=True, help="spec JSON with outcome and groups")
    _add_out_flags(p)

    p = sub.add_parser("report", help="yearly field-area summaries of prior outputs")
    _add_out_flags(p)

    return parser


# ----------------------------------------------------------------------
# Shared plumbing


def _resolve_seed(args) -> int:
    env = os.environ.get("CDENGINE_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise DataError(f"CDENGINE_SEED must be an integer, got {env!r}")
    return args.seed


def _load_corpus(args) -> corpus_mod.Corpus:
    nodes = Path(args.nodes)
    if not nodes.exists():
        raise DataError(f"nodes file not found: {nodes}")
    if corpus_mod.is_corpus_cache(nodes):
        return corpus_mod.load_corpus(nodes)
    if not args.edges:
        raise DataError("an edges file is required unless --nodes is a corpus cache")
    if not Path(args.edges).exists():
        raise DataError(f"edges file not found: {args.edges}")
    options = corpus_mod.IngestOptions(taxonomy=args.taxonomy)
    return corpus_mod.ingest(nodes, args.edges, options)


def _parse_window(raw: str) -> int | None:
    if raw.lower() == "all":
        return None
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"--window must be an integer or 'all', got {raw!r}")
    if value < 0:
        raise UsageError("--window must be non-negative")
    return value


def _parse_j_rule(raw: str) -> JRule:
    if raw.lower() == "all":
        return JRule.all_references()
    try:
        l = int(raw)
    except ValueError:
        raise UsageError(f"--j-rule must be an integer or 'all', got {raw!r}")
    if l < 1:
        raise UsageError("--j-rule requires L >= 1")
    return JRule.at_least(l)


def _disruption_config(args) -> DisruptionConfig:
    return DisruptionConfig(
        window=_parse_window(args.window),
        include_same_year=args.include_same_year,
        j_rule=_parse_j_rule(args.j_rule),
        include_k_in_denominator=not args.no_k,
        horizon=args.horizon,
    )


def _rewire_config(args, seed: int) -> nullmodel.RewireConfig:
    try:
        return nullmodel.RewireConfig(replicas=args.replicas,
                                      swap_multiplier=args.swap_multiplier,
                                      seed=seed,
                                      subsample_fraction=args.subsample)
    except ValueError as exc:
        raise UsageError(str(exc))


def _config_dict(args, keys: tuple[str, ...]) -> dict:
    return {k: getattr(args, k.replace("-", "_")) for k in keys}


class Run:
    """Holds the output directory, config hash, and manifest under assembly."""

    def __init__(self, command: str, out_dir: str | Path, config: dict, seed: int):
        self.command = command
        self.out = Path(out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.config = config
        self.seed = seed
        self.cfg_hash = tsvio.config_hash(config)
        self.row_counts: dict[str, int] = {}
        self.extra: dict = {}

    def emit(self, name: str, header, rows) -> Path:
        path = self.out / name
        self.row_counts[name] = tsvio.write_tsv(path, header, rows,
                                                self.command, self.cfg_hash, self.seed)
        return path

    def finish(self) -> None:
        manifest = {
            "command": self.command,
            "config": self.config,
            "config_hash": self.cfg_hash,
            "seed": self.seed,
            "versions": {
                "cdengine": __version__,
                "python": platform.python_version(),
                "numpy": np.__version__,
            },
            "row_counts": self.row_counts,
            **self.extra,
        }
        path = self.out / f"manifest_{self.command}.json"
        path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n",
                        encoding="utf-8")


def _field_area_map(corpus) -> dict[str, str]:
    return {fs: fa for fs, fa in zip(corpus.field_sub, corpus.field_area)}


# ----------------------------------------------------------------------
# Commands


CORPUS_KEYS = ("nodes", "edges", "taxonomy")
CD_KEYS = CORPUS_KEYS + ("window", "include_same_year", "j_rule", "no_k", "horizon")
NULL_KEYS = ("replicas", "swap_multiplier", "subsample")


def _cd_base_rows(corpus, table, extra_cols=()):
    years = corpus.years
    for i in range(corpus.n_docs):
        v = float(table.values[i])
        row = [corpus.doc_ids[i], int(years[i]), corpus.field_sub[i],
               int(table.ni[i]), int(table.nj[i]), int(table.nk[i]), int(table.nb[i]),
               None if np.isnan(v) else v]
        for col in extra_cols:
            c = float(col[i])
            row.append(None if np.isnan(c) else c)
        yield row


def cmd_ingest(args, seed: int) -> int:
    run = Run("ingest", args.out, _config_dict(args, CORPUS_KEYS), seed)
    corpus = _load_corpus(args)
    corpus_mod.save_corpus(corpus, run.out / "corpus.cdc")
    run.emit("validation.tsv", ["check", "count"], corpus.validation.as_rows())

    table = corpus_mod.growth_regressors(corpus_mod.field_year_aggregates(corpus))
    header = ["level", "field", "year", "n_new_works", "mean_refs_out", "mean_authors",
              "ln_n_new_1", "ln_n_new_5", "ln_n_new_10"]
    rows = []
    for level in ("sub", "area"):
        for (f, y), row in table.rows(level).items():
            rows.append([level, f, y, int(row["n_new_works"]), row["mean_refs_out"],
                         row["mean_authors"], row["ln_n_new_1"], row["ln_n_new_5"],
                         row["ln_n_new_10"]])
    run.emit("field_year.tsv", header, rows)
    run.extra["field_area_map"] = _field_area_map(corpus)
    run.finish()
    return 0


def cmd_validate(args, seed: int) -> int:
    run = Run("validate", args.out, _config_dict(args, CORPUS_KEYS), seed)
    corpus = _load_corpus(args)
    run.emit("validation.tsv", ["check", "count"], corpus.validation.as_rows())
    run.extra["field_area_map"] = _field_area_map(corpus)
    run.finish()
    return 0


CD_HEADER = ["doc_id", "year", "field_sub", "N_i", "N_j", "N_k", "N_b", "cd_value"]


def cmd_cd(args, seed: int) -> int:
    run = Run("cd", args.out, _config_dict(args, CD_KEYS + ("variants",)), seed)
    corpus = _load_corpus(args)
    config = _disruption_config(args)
    table = batch_cd(corpus, config, args.threads)
    header = list(CD_HEADER)
    extra = []
    if args.variants:
        variants = di_variants(corpus, window=config.window,
                               include_same_year=config.include_same_year,
                               horizon=config.horizon, threads=args.threads)
        header += ["di_1_no_k", "di_star", "no_refs"]
        extra = [variants["di_1_no_k"].values, variants["di_star"].values]
        rows = []
        for base, flag in zip(_cd_base_rows(corpus, table, extra), table.nb == 0):
            rows.append(base + [int(flag)])
        run.emit("cd.tsv", header, rows)
    else:
        run.emit("cd.tsv", header, _cd_base_rows(corpus, table))
    run.extra["field_area_map"] = _field_area_map(corpus)
    run.finish()
    return 0


def cmd_normalize(args, seed: int) -> int:
    run = Run("normalize", args.out,
              _config_dict(args, CD_KEYS + ("normalize", "field_level")), seed)
    corpus = _load_corpus(args)
    config = _disruption_config(args)
    table = batch_cd(corpus, config, args.threads)

    modes = {"paper": args.normalize in (None, "paper"),
             "fy": args.normalize in (None, "fy")}
    header = list(CD_HEADER)
    extra = []
    if modes["paper"]:
        header.append("cd_paper_norm")
        extra.append(normalized_values(table, corpus, NormalizationContext(PAPER)))
    if modes["fy"]:
        header.append("cd_fy_norm")
        fy = corpus_mod.field_year_aggregates(corpus)
        ctx = NormalizationContext(FIELD_YEAR,
                                   nb_mean_lookup=fy.nb_mean_lookup(args.field_level),
                                   field_level=args.field_level)
        extra.append(normalized_values(table, corpus, ctx))
    run.emit("normalize.tsv", header, _cd_base_rows(corpus, table, extra))
    run.extra["field_area_map"] = _field_area_map(corpus)
    run.finish()
    return 0


def cmd_null(args, seed: int) -> int:
    run = Run("null", args.out, _config_dict(args, CD_KEYS + NULL_KEYS), seed)
    corpus = _load_corpus(args)
    z = nullmodel.cd_zscores(corpus, _disruption_config(args),
                             _rewire_config(args, seed), args.threads)
    rows = []
    for pos in range(len(z.doc_ids)):
        rows.append([z.doc_ids[pos],
                     _opt(z.observed[pos]), _opt(z.null_mean[pos]),
                     _opt(z.null_sd[pos]), _opt(z.z[pos])])
    run.emit("zscores.tsv", ["doc_id", "observed", "null_mean", "null_sd", "z"], rows)
    run.emit("yearly_z.tsv", ["year", "mean_z", "n"],
             [[y, mz, n] for y, mz, n in z.yearly])
    run.finish()
    return 0


def _opt(x: float):
    x = float(x)
    return None if np.isnan(x) else x


def cmd_atypical(args, seed: int) -> int:
    run = Run("atypical", args.out, _config_dict(args, CORPUS_KEYS + NULL_KEYS + ("pair_key",)), seed)
    corpus = _load_corpus(args)
    result = nullmodel.atypical_combinations(corpus, _rewire_config(args, seed),
                                             pair_key=args.pair_key)
    run.emit("atypical_docs.tsv",
             ["doc_id", "year", "n_pairs", "conventionality_z", "novelty_z"],
             [[corpus.doc_ids[d], int(corpus.years[d]), n, conv, nov]
              for d, n, conv, nov in result.doc_rows])
    run.emit("atypical_cdf.tsv", ["decade", "grid_value", "cdf"], result.cdf_rows)
    run.extra["coverage"] = {
        "docs_skipped_few_keyed_refs": result.skipped_few_refs,
        "refs_missing_pair_key": result.refs_missing_key,
    }
    run.finish()
    return 0


def cmd_knowledge(args, seed: int) -> int:
    run = Run("knowledge", args.out,
              _config_dict(args, CORPUS_KEYS + ("field_level", "embeddings")), seed)
    corpus = _load_corpus(args)

    rows = [[corpus.doc_ids[i], int(corpus.years[i]), corpus.field_sub[i],
             n_refs, ratio, mean_age, sd_age]
            for i, n_refs, ratio, mean_age, sd_age in knowledge.knowledge_rows(corpus)]
    run.emit("knowledge.tsv",
             ["doc_id", "year", "field_sub", "n_refs", "self_cite_ratio",
              "mean_age_cited", "sd_age_cited"], rows)

    level = args.field_level
    entropy = knowledge.diversity_of_work_cited(corpus, level)
    shares, membership = knowledge.top1pct_share(corpus, level)
    vectorizer = (knowledge.embedding_table_vectorizer(args.embeddings)
                  if args.embeddings else None)
    semdiv = knowledge.semantic_diversity(
        corpus, knowledge.members_by_field_year(corpus, membership), vectorizer)
    keys = sorted(set(entropy) | set(shares) | set(semdiv))
    run.emit("knowledge_fy.tsv",
             ["field", "year", "diversity_entropy", "top1pct_share", "semantic_diversity"],
             [[f, y, entropy.get((f, y)), shares.get((f, y)), semdiv.get((f, y))]
              for f, y in keys])
    run.extra["field_area_map"] = _field_area_map(corpus)
    run.finish()
    return 0


def cmd_text(args, seed: int) -> int:
    run = Run("text", args.out,
              _config_dict(args, CORPUS_KEYS + ("scope", "field_level", "stopwords", "pos_lexicon")), seed)
    corpus = _load_corpus(args)
    stopwords = (text.load_stopwords(args.stopwords) if args.stopwords
                 else text.default_stopwords())
    lexicon = text.load_pos_lexicon(args.pos_lexicon) if args.pos_lexicon else None
    config = text.TokenPipelineConfig(stopwords=stopwords, pos_lexicon=lexicon)

    ttr = text.type_token_ratio(corpus, args.scope, args.field_level, config)
    run.emit("ttr.tsv", ["field", "year", "ttr"],
             [[f, y, v] for (f, y), v in sorted(ttr.items())])
    if args.scope == "abstract":
        coverage = text.abstract_coverage(corpus, args.field_level)
        run.extra["abstract_coverage"] = {
            f"{f}/{y}": {"docs": n, "with_abstract": w}
            for (f, y), (n, w) in coverage.items() if n and w / n < 0.5}

    novelty = text.word_pair_novelty(corpus, args.field_level, config)
    run.emit("pair_novelty.tsv", ["field", "year", "novelty"],
             [[f, y, v] for (f, y), v in sorted(novelty.items())])

    if lexicon:
        periods = text.decade_periods(corpus)
        verb_rows = []
        for period, ranking in text.verb_frequency(corpus, periods, config=config).items():
            for lemma, count, rank in ranking:
                verb_rows.append([period[0], period[1], rank, lemma, count])
        run.emit("verbs.tsv", ["period_start", "period_end", "rank", "lemma", "count"],
                 verb_rows)
    run.finish()
    return 0


def cmd_buckets(args, seed: int) -> int:
    run = Run("buckets", args.out, _config_dict(args, CD_KEYS), seed)
    corpus = _load_corpus(args)
    table = batch_cd(corpus, _disruption_config(args), args.threads)
    counts, composition = bucket_conservation(table, corpus)

    from .disruption import BUCKET_LABELS
    rows = []
    for year in sorted(counts):
        for label, count in zip(BUCKET_LABELS, counts[year]):
            rows.append([year, label, count])
    run.emit("buckets.tsv", ["year", "interval", "count"], rows)
    run.emit("bucket_fields.tsv", ["year", "field_area", "share"],
             [[y, f, share] for (y, f), share in composition.items()])
    run.finish()
    return 0


def _load_spec_file(path) -> dict:
    p = Path(path)
    if not p.exists():
        raise DataError(f"spec file not found: {p}")
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{p}: invalid JSON: {exc}")


def cmd_regress(args, seed: int) -> int:
    run = Run("regress", args.out, {"data": args.data, "spec": args.spec}, seed)
    spec_obj = _load_spec_file(args.spec)
    spec = stats.RegressionSpec.from_dict(spec_obj)
    data = tsvio.read_columns(args.data)
    fit = stats.ols_fit(data, spec)
    run.emit("fit.tsv", ["term", "coefficient", "se", "p"],
             [[t, float(c), float(s), float(pv)]
              for t, c, s, pv in zip(fit.terms, fit.coef, fit.se, fit.p)])
    run.extra["fit_summary"] = {"r2": fit.r2, "adj_r2": fit.adj_r2, "n": fit.n,
                                "k": fit.k, "dropped_rows": fit.dropped_rows}
    group = spec_obj.get("predict_year_group")
    if group:
        run.emit("predictions.tsv", ["level", "predicted"],
                 [[level, yhat] for level, yhat in stats.predict_year_series(fit, group)])
    run.finish()
    return 0


def cmd_shapley(args, seed: int) -> int:
    run = Run("shapley", args.out, {"data": args.data, "spec": args.spec}, seed)
    spec_obj = _load_spec_file(args.spec)
    try:
        outcome = spec_obj["outcome"]
        groups = spec_obj["groups"]
    except KeyError as exc:
        raise DataError(f"shapley spec needs {exc} key")
    data = tsvio.read_columns(args.data)
    shares = stats.shapley_owen(data, outcome, groups,
                                fe_columns=spec_obj.get("fe_columns", ()),
                                metric=spec_obj.get("metric", stats.ADJ_R2),
                                threads=args.threads or os.cpu_count() or 1)
    run.emit("shapley.tsv", ["group", "share"],
             [[g, s] for g, s in shares.items()])
    run.extra["total_share"] = sum(shares.values())
    run.finish()
    return 0


REPORT_SOURCES = {
    "cd.tsv": ("cd_value", "di_1_no_k", "di_star"),
    # cd_value appears in normalize.tsv too; cd.tsv stays its only source so
    # the two files never double-count the same metric
    "normalize.tsv": ("cd_paper_norm", "cd_fy_norm"),
    "knowledge.tsv": ("self_cite_ratio", "mean_age_cited", "sd_age_cited"),
}


def _merged_field_area_map(out_dir: Path) -> dict[str, str]:
    mapping: dict[str, str] = {}
    for manifest in sorted(out_dir.glob("manifest_*.json")):
        try:
            obj = json.loads(manifest.read_text(encoding="utf-8"))
        except json.JSONDecodeError:
            continue
        mapping.update(obj.get("field_area_map", {}))
    return mapping


def cmd_report(args, seed: int) -> int:
    out_dir = Path(args.out)
    area_of = _merged_field_area_map(out_dir)
    acc: dict[tuple[str, str, int], list[float]] = {}
    found = False
    for name, metrics in REPORT_SOURCES.items():
        path = out_dir / name
        if not path.exists():
            continue
        cols = tsvio.read_columns(path)
        present = [m for m in metrics if m in cols]
        if not present or "field_sub" not in cols or "year" not in cols:
            continue
        found = True
        for metric in present:
            for fs, year, value in zip(cols["field_sub"], cols["year"], cols[metric]):
                if value is None:
                    continue
                area = area_of.get(fs, fs)
                acc.setdefault((metric, area, int(year)), []).append(float(value))
    if not found:
        raise DataError(f"no reportable outputs found in {out_dir}")

    run = Run("report", args.out, {"sources": sorted(REPORT_SOURCES)}, seed)
    rows = []
    per_year: dict[tuple[str, int], list[float]] = {}
    for (metric, area, year), values in sorted(acc.items()):
        mean = sum(values) / len(values)
        rows.append([metric, area, year, mean, len(values)])
        per_year.setdefault((metric, year), []).append(mean)
    # cross-field series: mean of the per-field means, the convention used for
    # plotting field-averaged yearly trends
    for (metric, year), means in sorted(per_year.items()):
        rows.append([metric, "(all)", year, sum(means) / len(means), len(means)])
    run.emit("report.tsv", ["metric", "field_area", "year", "mean", "n"], rows)
    run.finish()
    return 0


COMMANDS = {
    "ingest": cmd_ingest,
    "validate": cmd_validate,
    "cd": cmd_cd,
    "normalize": cmd_normalize,
    "null": cmd_null,
    "atypical": cmd_atypical,
    "knowledge": cmd_knowledge,
    "text": cmd_text,
    "buckets": cmd_buckets,
    "regress": cmd_regress,
    "shapley": cmd_shapley,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        print(parser.format_usage(), file=sys.stderr, end="")
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    try:
        seed = _resolve_seed(args)
        return COMMANDS[args.command](args, seed)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

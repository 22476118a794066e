"""Command-line entry point.

Every subcommand is a thin wrapper over the core package. Query-style
commands (classes, contextualize, similarity, evaluate, attention-demo)
accept --server URL and then act as a plain HTTP client of a running
`depsense serve` instance; without it they call the same handlers
in-process.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import RunConfig, config_from, parse_relations
from .conllu import ParseIssue, iter_trees
from .errors import DepsenseError, MissingVocabError
from .service import Resources, load_resources
from .service import app as service_app
from .service import schemas
from .spaces import SpaceSet, build_ppmi_spaces, save_spaceset
from .toydata import benchmark_corpus, disambiguation_conllu
from .triples import TripleCountTable, extract_triples, load_counts, save_counts

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class CliParser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here is exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def _info(message: str) -> None:
    print(message, file=sys.stderr)


def _build_config(args) -> RunConfig:
    overrides = {}
    for key in ("corpus", "counts", "spaces", "embeddings", "dataset", "report",
                "mode", "k", "relevance", "fallback", "min_count", "max_dims", "seed"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value.upper() if key in ("mode", "relevance", "fallback") else value
    if getattr(args, "relations", None):
        overrides["relations"] = parse_relations(args.relations)
    return config_from(getattr(args, "config", None), **overrides)


def _resources(config: RunConfig, need_spaces: bool = True) -> Resources:
    if need_spaces:
        return load_resources(config)
    from .config import load_table

    return Resources(config=config, table=load_table(config), spaces=SpaceSet())


def _post(server: str, endpoint: str, request, response_model):
    import httpx

    url = server.rstrip("/") + endpoint
    reply = httpx.post(url, json=request.model_dump(), timeout=120.0)
    if reply.status_code != 200:
        try:
            detail = reply.json().get("detail", reply.text)
        except ValueError:
            detail = reply.text
        raise DepsenseError(f"{url}: HTTP {reply.status_code}: {detail}")
    return response_model(**reply.json())


# --- subcommands ------------------------------------------------------------------

def cmd_extract(args) -> int:
    config = _build_config(args)
    paths = args.corpus_files or ([config.corpus] if config.corpus else [])
    if not paths:
        _warn("no corpus file given (use --corpus or positional paths)")
        return EXIT_USAGE
    if not config.counts:
        _warn("no output counts path given (--counts)")
        return EXIT_USAGE
    for path in paths:
        if not os.path.exists(path):
            _warn(f"missing corpus file: {path}")
            return EXIT_DATA

    table = TripleCountTable()
    sentences = 0
    edges_kept = 0
    edges_seen = 0
    issues: list[ParseIssue] = []
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            for tree in iter_trees(fh, issues=issues):
                sentences += 1
                edges_seen += sum(1 for _ in tree.edges())
                for triple in extract_triples(tree, config.relations):
                    table.add(triple)
                    edges_kept += 1
    for issue in issues:
        _warn(f"{issue}")
    if table.total == 0:
        _warn("no triples extracted")
        return EXIT_DATA
    save_counts(table, config.counts)
    _info(
        f"extract: {sentences} sentences, {edges_kept} edges kept, "
        f"{edges_seen - edges_kept} edges dropped, {len(issues)} sentences dropped, "
        f"{len(table)} distinct triples -> {config.counts}"
    )
    return EXIT_OK


def cmd_build(args) -> int:
    config = _build_config(args)
    if not config.counts or not os.path.exists(config.counts or ""):
        _warn(f"missing counts file: {config.counts}")
        return EXIT_DATA
    if not config.spaces:
        _warn("no output spaces directory given (--spaces)")
        return EXIT_USAGE
    table = load_counts(config.counts)
    spaces = build_ppmi_spaces(table, min_count=config.min_count, max_dims=config.max_dims)
    written = save_spaceset(spaces, config.spaces)
    for pos, space in sorted(spaces.spaces.items()):
        _info(f"build: {pos} space: {len(space)} lemmas x {space.dim} dims")
    _info(f"build: wrote {len(written)} space files under {config.spaces}")
    return EXIT_OK


def cmd_classes(args) -> int:
    config = _build_config(args)
    request = schemas.ClassesRequest(
        anchor_lemma=args.anchor_lemma,
        anchor_pos=args.anchor_pos,
        relation=args.relation,
        slot=args.slot,
        k=config.k,
        relevance=config.relevance,
        pos=args.pos,
    )
    if args.server:
        response = _post(args.server, "/classes", request, schemas.ClassesResponse)
    else:
        response = service_app.handle_classes(_resources(config, need_spaces=False), request)
    print(f"#class anchor={response.anchor_lemma}/{response.anchor_pos} "
          f"relation={response.relation} slot={response.slot} pos={response.class_pos}")
    print("#rank\tlemma\tpos\trelevance")
    for m in response.members:
        print(f"{m.rank}\t{m.lemma}\t{m.pos}\t{m.relevance:g}")
    return EXIT_OK


def cmd_contextualize(args) -> int:
    config = _build_config(args)
    if args.input == "-":
        text = sys.stdin.read()
    else:
        if not os.path.exists(args.input):
            _warn(f"missing input file: {args.input}")
            return EXIT_DATA
        with open(args.input, encoding="utf-8") as fh:
            text = fh.read()
    request = schemas.ContextualizeRequest(
        conllu=text,
        mode=config.mode,
        k=config.k,
        fallback=config.fallback,
        relevance=config.relevance,
        top_n=args.top_n,
    )
    try:
        if args.server:
            response = _post(args.server, "/contextualize", request, schemas.ContextualizeResponse)
        else:
            response = service_app.handle_contextualize(_resources(config), request)
    except MissingVocabError as exc:
        _warn(f"out of vocabulary: {exc.lemma}/{exc.pos}")
        return EXIT_OK
    except DepsenseError as exc:
        # a strict-policy OOV relayed by the server keeps the local contract
        if "out of vocabulary" in str(exc):
            _warn(str(exc))
            return EXIT_OK
        raise
    for issue in response.parse_issues:
        _warn(issue)
    for s_no, sentence in enumerate(response.sentences, start=1):
        print(f"#sentence {s_no} root={sentence.root_index}")
        print("#token\tlemma\tpos\tapplied\ttop_contexts")
        for sense in sentence.senses:
            applied = ";".join(sense.applied) or "-"
            tops = ",".join(f"{t.context}={t.weight:.4f}" for t in sense.top_contexts) or "-"
            zeroed = " [zeroed]" if sense.zeroed else ""
            print(f"{sense.token_index}\t{sense.lemma}\t{sense.pos}\t{applied}\t{tops}{zeroed}")
        for lemma in sentence.oov:
            _warn(f"out of vocabulary: {lemma}")
    return EXIT_OK


def _parse_triple(text: str) -> schemas.TripleModel:
    parts = text.split()
    if len(parts) != 3:
        raise ValueError(f"expected 'subject verb object', got {text!r}")
    return schemas.TripleModel(subject=parts[0], verb=parts[1], object=parts[2])


def cmd_similarity(args) -> int:
    config = _build_config(args)
    try:
        request = schemas.SimilarityRequest(
            expr1=_parse_triple(args.expr1),
            expr2=_parse_triple(args.expr2),
            model=args.model,
            mode=config.mode,
            k=config.k,
            fallback=config.fallback,
            relevance=config.relevance,
        )
    except ValueError as exc:
        _warn(str(exc))
        return EXIT_USAGE
    if args.server:
        response = _post(args.server, "/similarity", request, schemas.SimilarityResponse)
    else:
        response = service_app.handle_similarity(_resources(config), request)
    for flag in response.flags:
        if flag.startswith("oov"):
            _warn(f"out of vocabulary: {flag.partition(':')[2]}")
    print("#model\tcosine\tscore_1to7\tflags")
    print(f"{response.model}\t{response.cosine:.6f}\t{response.score_1to7:.2f}"
          f"\t{','.join(response.flags) or '-'}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    config = _build_config(args)
    if not config.dataset:
        _warn("no dataset given (--dataset)")
        return EXIT_USAGE
    if not args.server and not os.path.exists(config.dataset):
        _warn(f"missing dataset file: {config.dataset}")
        return EXIT_DATA
    request = schemas.EvaluateRequest(
        model=args.model,
        dataset_path=config.dataset,
        mode=config.mode,
        k=config.k,
        fallback=config.fallback,
        relevance=config.relevance,
    )
    if args.server:
        response = _post(args.server, "/evaluate", request, schemas.EvaluateResponse)
    else:
        response = service_app.handle_evaluate(_resources(config), request)

    lines = [
        "#depsense-report v1",
        f"#model={response.model}\tn_pairs={response.n_pairs}"
        f"\tspearman_rho={response.spearman_rho:.6f}"
        f"\tzero_fallback={response.zero_fallback_count}\toov={response.oov_count}",
        "#expr1\texpr2\thuman\tmodel\tmodel_1to7\tflags",
    ]
    for r in response.records:
        lines.append(
            f"{r.expr1}\t{r.expr2}\t{r.human_score:.2f}\t{r.model_score:.6f}"
            f"\t{r.model_score * 7.0:.2f}\t{','.join(r.flags) or '-'}"
        )
    if config.report:
        with open(config.report, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        _info(f"evaluate: report written to {config.report}")
    print(f"model {response.model}: rho={response.spearman_rho:.4f} over "
          f"{response.n_pairs} pairs (zero-fallback {response.zero_fallback_count}, "
          f"oov {response.oov_count})")
    if not config.report:
        for line in lines[2:]:
            print(line)
    oov_records = [r for r in response.records if any(f.startswith("oov") for f in r.flags)]
    for r in oov_records:
        _warn(f"out of vocabulary pair: {r.expr1} / {r.expr2}")
    return EXIT_OK


def cmd_attention_demo(args) -> int:
    config = _build_config(args)
    lemmas = args.lemmas.split()
    if not lemmas:
        _warn("empty lemma list")
        return EXIT_USAGE
    request = schemas.AttentionDemoRequest(
        lemmas=lemmas,
        dim_model=args.dim,
        seed=config.seed,
        scaled=not args.unscaled,
        positional=not args.no_positional,
    )
    if args.server:
        response = _post(args.server, "/attention-demo", request, schemas.AttentionDemoResponse)
    else:
        response = service_app.handle_attention_demo(request, default_seed=config.seed)
    print("#attention weights (rows: query token, columns: key token)")
    print("#\t" + "\t".join(response.lemmas))
    for lemma, row in zip(response.lemmas, response.weights):
        print(lemma + "\t" + "\t".join(f"{w:.4f}" for w in row))
    print("#contextualized outputs")
    for lemma, row in zip(response.lemmas, response.outputs):
        print(lemma + "\t" + " ".join(f"{v:.4f}" for v in row))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    config = _build_config(args)
    app = service_app.create_app(config)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def cmd_demo_data(args) -> int:
    from .evaluation import save_dataset

    os.makedirs(args.out, exist_ok=True)
    config = _build_config(args)
    disambiguation = os.path.join(args.out, "disambiguation.conllu")
    with open(disambiguation, "w", encoding="utf-8") as fh:
        fh.write(disambiguation_conllu())
    corpus_text, pairs = benchmark_corpus(seed=config.seed, n_pairs=args.pairs)
    benchmark_path = os.path.join(args.out, "benchmark.conllu")
    with open(benchmark_path, "w", encoding="utf-8") as fh:
        fh.write(corpus_text)
    dataset_path = os.path.join(args.out, "benchmark-pairs.tsv")
    save_dataset(pairs, dataset_path)
    for path in (disambiguation, benchmark_path, dataset_path):
        _info(f"demo-data: wrote {path}")
    return EXIT_OK


# --- parser ------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, server: bool = False) -> None:
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--counts", help="triple counts TSV")
    p.add_argument("--spaces", help="spaces directory")
    p.add_argument("--embeddings", help="external embeddings: POS=path,POS=path")
    p.add_argument("--mode", choices=["MULT", "ADD", "mult", "add"], help="combination mode")
    p.add_argument("--k", type=int, help="paradigmatic class size")
    p.add_argument("--relevance", choices=["FREQ", "PPMI", "freq", "ppmi"],
                   help="class ranking measure")
    p.add_argument("--fallback", choices=["STRICT", "BACKOFF", "strict", "backoff"],
                   help="empty-class policy")
    p.add_argument("--relations", help="comma-separated dependency relation filter")
    p.add_argument("--min-count", dest="min_count", type=int, help="context frequency floor")
    p.add_argument("--max-dims", dest="max_dims", type=int, help="dimension cap per space")
    p.add_argument("--seed", type=int, help="seed for all randomness")
    if server:
        p.add_argument("--server", help="base URL of a running depsense service")


def build_parser() -> CliParser:
    parser = CliParser(prog="depsense", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract dependency triple counts from CoNLL-U")
    p.add_argument("corpus_files", nargs="*", help="CoNLL-U files")
    p.add_argument("--corpus", help="CoNLL-U file (alternative to positional)")
    _add_common(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("build", help="build PPMI spaces from counts")
    _add_common(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("classes", help="inspect a paradigmatic class")
    p.add_argument("anchor_lemma")
    p.add_argument("anchor_pos", choices=["NOUN", "VERB", "ADJ", "ADV", "noun", "verb", "adj", "adv"])
    p.add_argument("relation")
    p.add_argument("slot", choices=["HEAD", "DEPENDENT", "head", "dependent"])
    p.add_argument("--pos", help="restrict members to this POS")
    _add_common(p, server=True)
    p.set_defaults(func=cmd_classes)

    p = sub.add_parser("contextualize", help="contextualize a CoNLL-U sentence")
    p.add_argument("input", nargs="?", default="-", help="CoNLL-U file or '-' for stdin")
    p.add_argument("--top-n", dest="top_n", type=int, default=8,
                   help="context dimensions to show per sense")
    _add_common(p, server=True)
    p.set_defaults(func=cmd_contextualize)

    p = sub.add_parser("similarity", help="cosine between two SVO expressions")
    p.add_argument("expr1", help="'subject verb object'")
    p.add_argument("expr2", help="'subject verb object'")
    p.add_argument("--model", default="COMPOSITIONAL",
                   choices=["STATIC", "COMPOSITIONAL", "ATTENTION",
                            "static", "compositional", "attention"])
    _add_common(p, server=True)
    p.set_defaults(func=cmd_similarity)

    p = sub.add_parser("evaluate", help="score a dataset and report Spearman correlation")
    p.add_argument("--model", required=True,
                   choices=["STATIC", "COMPOSITIONAL", "ATTENTION",
                            "static", "compositional", "attention"])
    p.add_argument("--dataset", help="dataset TSV")
    p.add_argument("--report", help="write the structured report here")
    _add_common(p, server=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("attention-demo", help="single-head self-attention over a lemma list")
    p.add_argument("lemmas", help="whitespace-separated lemma list")
    p.add_argument("--dim", type=int, default=16, help="model width")
    p.add_argument("--unscaled", action="store_true", help="raw dot products (no 1/sqrt(d))")
    p.add_argument("--no-positional", dest="no_positional", action="store_true",
                   help="drop positional encodings")
    _add_common(p, server=True)
    p.set_defaults(func=cmd_attention_demo)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    _add_common(p)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("demo-data", help="write the bundled synthetic corpora")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--pairs", type=int, default=200, help="benchmark dataset size")
    _add_common(p)
    p.set_defaults(func=cmd_demo_data)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DepsenseError, FileNotFoundError, ValueError) as exc:
        _warn(str(exc))
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry points: ``nsts solve``, ``nsts synth`` and ``nsts compare``.

Exit status is 0 when the run is Solved, 1 for any other terminal status
and 2 for usage or configuration errors.  Settings come from flags first,
then the JSON file given with ``--config``, then (for the LLM endpoint and
key only) the environment.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .derivation import DerivationTree
from .llm import ENV_ENDPOINT, ConfigError, http_llm_oracle
from .oracle import AdversarialOracle, NullOracle, PerfectOracle, PromptTemplates, ScriptedOracle
from .parser import ParseError, parse_program, parse_query, query_variables
from .search import SearchConfig, SolveResult, Status, run_sequential_baseline, solve
from .synthesis import (
    make_synthesis_program,
    load_benchmark,
    synthesis_query,
    synthesize,
    target_derivation,
)
from .terms import Program, Term

EXIT_SOLVED, EXIT_UNSOLVED, EXIT_USAGE = 0, 1, 2

_SEARCH_KEYS = {
    "strategy": str,
    "depth_start": int,
    "depth_step": int,
    "node_budget": int,
    "oracle_budget": int,
    "max_answers": str,
    "seed": int,
    "max_depth": int,
    "context": str,
}


class UsageError(Exception):
    pass


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--oracle", help="null | scripted:<file> | perfect:<file> | adversarial | llm")
    sp.add_argument("--strategy", choices=["IterativeDeepening", "BreadthFirst"])
    sp.add_argument("--depth-start", type=int)
    sp.add_argument("--depth-step", type=int)
    sp.add_argument("--max-depth", type=int)
    sp.add_argument("--node-budget", type=int)
    sp.add_argument("--oracle-budget", type=int)
    sp.add_argument("--max-answers", help="a positive integer or 'all'")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--context", help="free text handed to the oracle with the program")
    sp.add_argument("--trace", metavar="PATH", help="write the search trace here")
    sp.add_argument("--stats", metavar="PATH", help="write stats JSON here ('-' for stdout)")
    sp.add_argument("--no-timing", action="store_true", help="report wall_ms as null")
    sp.add_argument("--prompts-dir", metavar="DIR", help="directory with init.txt/update.txt/system.txt")
    sp.add_argument("--config", metavar="FILE", help="JSON config with 'search' and 'llm' sections")
    sp.add_argument("--llm-endpoint")
    sp.add_argument("--llm-model")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nsts", description="Oracle-guided logic programming engine.")
    sub = ap.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("solve", help="answer a query over a program")
    sp.add_argument("--program", required=True, metavar="FILE")
    sp.add_argument("--query", required=True)
    _add_common(sp)
    sy = sub.add_parser("synth", help="synthesize an expression from a benchmark file")
    sy.add_argument("benchmark", metavar="BENCHMARK")
    _add_common(sy)
    cp = sub.add_parser("compare", help="guided search versus the propose-and-check loop")
    cp.add_argument("benchmark", nargs="?", metavar="BENCHMARK")
    cp.add_argument("--program", metavar="FILE")
    cp.add_argument("--query")
    _add_common(cp)
    return ap


def _load_config(path: Optional[str]) -> Dict[str, Any]:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read config {path}: {e}") from e
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    return data


def _setting(args, cfg: Dict[str, Any], name: str, default=None):
    v = getattr(args, name, None)
    if v is not None:
        return v
    v = cfg.get("search", {}).get(name)
    if v is not None:
        return _SEARCH_KEYS.get(name, lambda x: x)(v)
    return default


def _max_answers(text) -> Optional[int]:
    if text is None:
        return 1
    if str(text).lower() in ("all", "inf", "0"):
        return None
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"--max-answers must be an integer or 'all', got {text!r}")


def search_config(args, cfg: Dict[str, Any], templates: PromptTemplates) -> SearchConfig:
    try:
        return SearchConfig(
            strategy=_setting(args, cfg, "strategy", "IterativeDeepening"),
            depth_start=_setting(args, cfg, "depth_start", 4),
            depth_step=_setting(args, cfg, "depth_step", 2),
            node_budget=_setting(args, cfg, "node_budget"),
            oracle_call_budget=_setting(args, cfg, "oracle_budget", 16),
            max_answers=_max_answers(_setting(args, cfg, "max_answers")),
            seed=_setting(args, cfg, "seed", 0),
            max_depth=_setting(args, cfg, "max_depth"),
            context=_setting(args, cfg, "context", ""),
            trace=bool(args.trace),
            templates=templates,
        )
    except ValueError as e:
        raise UsageError(str(e)) from e


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror or e}") from e


def _read_json(path: str):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as e:
        raise UsageError(f"{path} is not valid JSON: {e}") from e


def make_oracle(spec: Optional[str], program: Program, query: Sequence[Term], args, cfg: Dict[str, Any],
                templates: PromptTemplates, default_derivation: Optional[DerivationTree] = None):
    kind, _, arg = (spec or "null").partition(":")
    if kind == "null":
        return NullOracle()
    if kind == "adversarial":
        seed = _setting(args, cfg, "seed", 0)
        return AdversarialOracle(program, query, seed=seed)
    if kind == "scripted":
        if not arg:
            raise UsageError("scripted oracle needs a file: --oracle scripted:<file>")
        script = _read_json(arg)
        if not isinstance(script, list):
            raise UsageError("a script file holds a JSON list of replies")
        return ScriptedOracle(script, query_variables(query))
    if kind == "perfect":
        if not arg:
            if default_derivation is None:
                raise UsageError("perfect oracle needs a derivation file: --oracle perfect:<file>")
            return PerfectOracle(default_derivation)
        data = _read_json(arg)
        solution = None
        if isinstance(data, dict) and "derivation" in data:
            solution, data = data.get("solution"), data["derivation"]
        try:
            return PerfectOracle(DerivationTree.from_dict(data), solution)
        except ValueError as e:
            raise UsageError(f"bad derivation in {arg}: {e}") from e
    if kind == "llm":
        llm = dict(cfg.get("llm", {}))
        endpoint = args.llm_endpoint or llm.pop("endpoint", None) or os.environ.get(ENV_ENDPOINT)
        model = args.llm_model or llm.pop("model", "")
        llm.pop("endpoint", None)
        allowed = {"temperature", "max_tokens", "timeout", "retries", "backoff"}
        options = {k: v for k, v in llm.items() if k in allowed}
        try:
            return http_llm_oracle(endpoint, model, templates=templates, **options)
        except ConfigError as e:
            raise UsageError(str(e)) from e
    raise UsageError(f"unknown oracle kind {kind!r}")


def _emit_outputs(res: SolveResult, args, out) -> None:
    for line in res.answer_lines():
        print(line, file=out)
    if not res.answers:
        print(f"no answer ({res.status.value})", file=sys.stderr)
    timing = not args.no_timing
    if args.stats == "-":
        print(res.stats_json(timing), file=out)
    elif args.stats:
        Path(args.stats).write_text(res.stats_json(timing) + "\n", encoding="utf-8")
    if args.trace and res.trace is not None:
        Path(args.trace).write_text("\n".join(res.trace) + "\n", encoding="utf-8")


def _exit_code(res: SolveResult) -> int:
    return EXIT_SOLVED if res.status is Status.SOLVED else EXIT_UNSOLVED


def _load_solve_inputs(args) -> Tuple[Program, Tuple[Term, ...]]:
    try:
        program = parse_program(_read(args.program))
        query = parse_query(args.query)
    except ParseError as e:
        raise UsageError(f"parse error: {e}") from e
    return program, query


def _load_bench(path: str):
    try:
        bench = load_benchmark(path)
        program = make_synthesis_program(bench.grammar, bench.examples)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror or e}") from e
    except ValueError as e:
        raise UsageError(f"bad benchmark {path}: {e}") from e
    target = None
    if bench.target:
        try:
            target = target_derivation(bench.grammar, bench.examples, bench.target)
        except ParseError as e:
            raise UsageError(f"bad target in {path}: {e}") from e
    return bench, program, target


def cmd_solve(args, cfg, templates, out) -> int:
    program, query = _load_solve_inputs(args)
    oracle = make_oracle(args.oracle, program, query, args, cfg, templates)
    res = solve(program, query, oracle, search_config(args, cfg, templates))
    _emit_outputs(res, args, out)
    return _exit_code(res)


def cmd_synth(args, cfg, templates, out) -> int:
    bench, program, target = _load_bench(args.benchmark)
    oracle = make_oracle(args.oracle, program, synthesis_query(), args, cfg, templates, target)
    res = synthesize(bench.grammar, bench.examples, oracle, search_config(args, cfg, templates))
    _emit_outputs(res, args, out)
    return _exit_code(res)


def compare_table(rows: List[Tuple[str, SolveResult]], timing: bool = True) -> str:
    header = ("runner", "status", "oracle_calls", "nodes_expanded", "answer", "time_ms")
    body = []
    for name, r in rows:
        t = f"{r.stats.wall_time * 1000:.1f}" if timing else "-"
        ans = r.answer_lines()[0] if r.answers else "-"
        body.append((name, r.status.value, str(r.stats.oracle_calls), str(r.stats.nodes_expanded), ans, t))
    widths = [max(len(x[i]) for x in [header] + body) for i in range(len(header))]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    return "\n".join(fmt.format(*row).rstrip() for row in [header] + body)


def cmd_compare(args, cfg, templates, out) -> int:
    target = None
    if args.benchmark:
        _, program, target = _load_bench(args.benchmark)
        query = synthesis_query()
    elif args.program and args.query:
        program, query = _load_solve_inputs(args)
    else:
        raise UsageError("compare needs a benchmark file or --program and --query")
    scfg = search_config(args, cfg, templates)
    budget = scfg.oracle_call_budget or 16
    guided = solve(program, query, make_oracle(args.oracle, program, query, args, cfg, templates, target), scfg)
    baseline = run_sequential_baseline(program, query,
                                       make_oracle(args.oracle, program, query, args, cfg, templates, target),
                                       budget, context=scfg.context, templates=templates)
    print(compare_table([("nsts", guided), ("sequential", baseline)], not args.no_timing), file=out)
    if args.stats:
        report = {"nsts": guided.stats_dict(not args.no_timing),
                  "sequential": baseline.stats_dict(not args.no_timing)}
        text = json.dumps(report, indent=2)
        if args.stats == "-":
            print(text, file=out)
        else:
            Path(args.stats).write_text(text + "\n", encoding="utf-8")
    return _exit_code(guided)


COMMANDS = {"solve": cmd_solve, "synth": cmd_synth, "compare": cmd_compare}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args.config)
        if args.prompts_dir and not Path(args.prompts_dir).is_dir():
            raise UsageError(f"prompts directory {args.prompts_dir} does not exist")
        templates = PromptTemplates.load(args.prompts_dir)
        return COMMANDS[args.command](args, cfg, templates, out)
    except UsageError as e:
        print(f"nsts: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

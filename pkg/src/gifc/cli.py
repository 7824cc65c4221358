"""Command-line entry point."""
from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

from . import dynsec
from .cc.machine import (DEFAULT_FUEL, BlameResult, Config, Final, PreservationFailure,
                         StuckResult, Timeout, run, render_value)
from .cc.terms import Cast, Const, render_cc, subst, subterms
from .compiler import compile_term
from .harness.fuzz import SUITES
from .harness.gen import GenConfig
from .labels import LOW
from .mutation import MUTATIONS
from .surface import (INPUT_TYPE, ParseError, SurfaceTypeError, default_context, parse,
                      typecheck_surface)
from .surface.syntax import INPUT, Var
from .surface.syntax import subterms as surface_subterms

OK, BLAME, USER_ERROR, DEFECT = 0, 1, 2, 3


class UsageError(Exception):
  pass


def _read(path: str) -> str:
  p = Path(path)
  if p.exists():
    return p.read_text(encoding="utf-8")
  name = p.name if p.suffix else f"{p.name}.gifc"
  bundled = resources.files("gifc") / "programs" / name
  if bundled.is_file():
    return bundled.read_text(encoding="utf-8")
  raise UsageError(f"no such file: {path}")


def _load(args):
  m = parse(_read(args.file), strict_pc=args.strict_pc)
  return m, compile_term(m, default_context())


def _reads_input(m) -> bool:
  return any(isinstance(t, Var) and t.name == INPUT for t in surface_subterms(m))


def _input(args, m) -> str | None:
  if not _reads_input(m):
    return None
  if args.input is None:
    raise UsageError("the program reads user-input; pass --input true|false")
  return args.input


def cmd_check(args) -> int:
  m = parse(_read(args.file), strict_pc=args.strict_pc)
  print(typecheck_surface(m, default_context()))
  return OK


def cmd_compile(args) -> int:
  _, out = _load(args)
  if args.emit_cc:
    print(render_cc(out.term))
  else:
    casts = sum(1 for t in subterms(out.term) if isinstance(t, Cast))
    print(f"{out.type} ({casts} casts)")
  return OK


def cmd_run(args) -> int:
  m, out = _load(args)
  value = _input(args, m)
  term = out.term if value is None else subst(out.term, INPUT, Const(value))

  def trace(i, rule, redex, cfg):
    print(f"{i:5d} {rule:16s} {render_cc(redex)}")

  r = run(Config(term), args.fuel, expected=out.type if args.preserve else None,
          trace=trace if args.trace else None)
  match r:
    case Final(v):
      print(render_value(v, out.type))
      return OK
    case BlameResult(p):
      print(f"blame {p}")
      return BLAME
    case Timeout(n):
      print(f"timeout after {n} steps")
    case StuckResult(cfg, reason):
      print(f"stuck: {reason}\n  at {render_cc(cfg.term)}")
    case PreservationFailure(cfg, rule, reason):
      print(f"preservation failure after {rule}: {reason}\n  at {render_cc(cfg.term)}")
  return DEFECT


def cmd_erase(args) -> int:
  _, out = _load(args)
  print(dynsec.render(dynsec.erase(out.term, out.type)))
  return OK


def cmd_run_dyn(args) -> int:
  m, out = _load(args)
  value = _input(args, m)
  erased = dynsec.erase(out.term, out.type)
  if value is not None:
    erased = dynsec.subst(erased, INPUT, dynsec.Const(value, INPUT_TYPE.label))
  r = dynsec.run_dyn(erased, LOW, args.fuel)
  print(dynsec.render_outcome(r))
  match r:
    case dynsec.DynFinal():
      return OK
    case dynsec.NSUError():
      return BLAME
  return DEFECT


def cmd_fuzz(args) -> int:
  cfg = GenConfig(seed=args.seed, count=args.count, max_depth=args.max_depth,
                  heap_ops=not args.no_heap, star_bias=args.star_bias)
  rep = SUITES[args.kind](cfg, mutate=args.mutate)
  for line in rep.lines():
    print(line)
  if args.out:
    rep.write(args.out)
  return DEFECT if rep.violations else OK


def build_parser() -> argparse.ArgumentParser:
  p = argparse.ArgumentParser(prog="gifc", description="Gradual information-flow control toolkit.")
  sub = p.add_subparsers(dest="command", required=True)

  def program(name: str, helptext: str, func):
    sp = sub.add_parser(name, help=helptext)
    sp.add_argument("file", help="program file, or the name of a bundled program")
    sp.add_argument("--strict-pc", action="store_true",
                    help="reject lambdas and function types without a pc label")
    sp.set_defaults(func=func)
    return sp

  program("check", "type-check a program and print its type", cmd_check)
  sp = program("compile", "insert casts", cmd_compile)
  sp.add_argument("--emit-cc", action="store_true", help="print the cast-calculus term")
  sp = program("run", "compile and evaluate", cmd_run)
  sp.add_argument("--input", choices=("true", "false"))
  sp.add_argument("--trace", action="store_true", help="print every reduction step")
  sp.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
  sp.add_argument("--preserve", action="store_true", help="re-typecheck every configuration")
  program("erase", "print the erased dynamic-language term", cmd_erase)
  sp = program("run-dyn", "evaluate the erased term under the dynamic monitor", cmd_run_dyn)
  sp.add_argument("--input", choices=("true", "false"))
  sp.add_argument("--fuel", type=int, default=DEFAULT_FUEL)

  sp = sub.add_parser("fuzz", help="run a property suite over generated programs")
  sp.add_argument("kind", choices=sorted(SUITES))
  sp.add_argument("--seed", type=int, default=1)
  sp.add_argument("--count", type=int, default=100)
  sp.add_argument("--out", help="write the report and a JSON summary here")
  sp.add_argument("--mutate", choices=sorted(MUTATIONS), help="deliberately break one rule")
  sp.add_argument("--max-depth", type=int, default=6)
  sp.add_argument("--star-bias", type=float, default=0.4)
  sp.add_argument("--no-heap", action="store_true", help="generate programs without references")
  sp.set_defaults(func=cmd_fuzz)
  return p


def main(argv: list[str] | None = None) -> int:
  parser = build_parser()
  try:
    args = parser.parse_args(argv)
  except SystemExit as exc:
    return USER_ERROR if exc.code else OK
  try:
    return args.func(args)
  except (ParseError, SurfaceTypeError) as err:
    print(err, file=sys.stderr)
    return USER_ERROR
  except UsageError as err:
    print(f"gifc: {err}", file=sys.stderr)
    return USER_ERROR


if __name__ == "__main__":
  sys.exit(main())

import pytest

from gifc.cc.machine import (BlameResult, Config, Final, Heap, Stuck, StuckResult, Timeout,
                             is_final, render_value, run, step)
from gifc.cc.terms import (Addr, App, Assign, Blame, Cast, Const, If, Lam, Let, Prot, RefE, RefQ,
                           Var, subst)
from gifc.cc.typing import CCTypeError, check
from gifc.coercions import parse_seq
from gifc.harness.fuzz import FUEL
from gifc.harness.gen import NI_CONTEXT, GenConfig, gen_typed
from gifc.compiler import compile_term
from gifc.labelexpr import Apply, Lit
from gifc.labels import BOOL, HIGH, LOW, UNIT, LType, Ref
from gifc.surface.syntax import INPUT
from gifc.vcoercions import IdBase, VCoercion

from conftest import compiled

BL, BH = LType(BOOL, LOW), LType(BOOL, HIGH)
T, F = Const("true"), Const("false")
UP = Apply(Lit(LOW), parse_seq("id(low);up"))


def with_input(out, value):
  return subst(out.term, INPUT, Const(value))


def test_if_true_protects_the_branch():
  m = If(T, BL, HIGH, F, T)
  cfg, rule, _ = step(Config(m))
  assert rule == "if-true"
  assert cfg.term == Prot(UP, HIGH, F, BL)


def test_prot_value_stamps():
  cfg, _, _ = step(Config(Prot(UP, HIGH, T, BL)))
  assert cfg.term == Cast(T, VCoercion(IdBase(BOOL), parse_seq("id(low);up")))
  cfg, _, _ = step(Config(Prot(Lit(LOW), LOW, T, BL)))
  assert cfg.term == T


def test_checked_allocation_blames_under_a_high_pc():
  m = RefQ("p", LOW, T, BOOL)
  high_star = Apply(Lit(LOW), parse_seq("id(low);up;high!"))
  assert run(Config(m, pc=high_star)) == BlameResult("p")
  r = run(Config(m, pc=Apply(Lit(LOW), parse_seq("id(low);low!"))))
  assert isinstance(r, Final) and r.value == Addr(LOW, 0)


def test_beta_and_allocation():
  f = Lam("x", RefE(LOW, Var("x"), BOOL))
  r = run(Config(App(f, T, BL, LType(Ref(BL), LOW), LOW)))
  assert isinstance(r, Final)
  assert r.value == Addr(LOW, 0)
  assert r.heap.cells == {(LOW, 0): T}
  assert r.heap.types == {(LOW, 0): BOOL}


def test_heap_indices_are_per_label():
  h = Heap()
  h, a = h.alloc(LOW, T, BOOL)
  h, b = h.alloc(HIGH, T, BOOL)
  h, c = h.alloc(LOW, F, BOOL)
  assert (a, b, c) == (Addr(LOW, 0), Addr(HIGH, 0), Addr(LOW, 1))


def test_final_configurations_do_not_step():
  for t in (T, Blame("p")):
    with pytest.raises(Stuck):
      step(Config(t))


def test_stuck_is_reported_not_raised():
  r = run(Config(App(T, T, BL, BL, LOW)))
  assert isinstance(r, StuckResult)


def test_timeout_is_distinct():
  two = Let("x", T, BL, Let("y", Var("x"), BL, Var("y")))
  assert run(Config(two), fuel=1) == Timeout(1)
  assert run(Config(two), fuel=2) == Final(T, Heap())


@pytest.mark.parametrize("name, value, want", [
  ("flip_star", "true", "p1"), ("flip_star", "false", "p1"), ("smix", None, "p1"),
])
def test_blaming_programs(name, value, want):
  out = compiled(name)
  term = out.term if value is None else with_input(out, value)
  assert run(Config(term), expected=out.type) == BlameResult(want)


@pytest.mark.parametrize("value", ["true", "false"])
def test_left_nsu_program_returns_unit(value):
  out = compiled("nsu_left")
  r = run(Config(with_input(out, value)), expected=out.type)
  assert isinstance(r, Final)
  assert render_value(r.value, out.type).startswith("unit@low")


def test_right_program_checks_statically():
  out = compiled("nsu_right")
  check(out.term, NI_CONTEXT, {}, LOW, LOW, out.type)


def test_prot_bound_violation():
  with pytest.raises(CCTypeError) as err:
    check(Prot(Lit(LOW), HIGH, T, BH), {}, {}, LOW, LOW, BH)
  assert err.value.rule == "prot"


def test_assign_under_high_pc_is_rejected():
  sigma = {(LOW, 0): BOOL}
  m = Assign(Addr(LOW, 0), T, BOOL, LOW, LOW)
  check(m, {}, sigma, LOW, LOW, LType(UNIT, LOW))
  with pytest.raises(CCTypeError) as err:
    check(m, {}, sigma, HIGH, LOW, LType(UNIT, LOW))
  assert err.value.rule == "assign"


def test_trace_reports_each_step():
  out = compiled("fid_star")
  seen = []
  r = run(Config(with_input(out, "true")), trace=lambda i, rule, redex, cfg: seen.append(rule))
  assert r == BlameResult("p2")
  assert seen and len(set(seen)) > 2


def _programs(n):
  cfg = GenConfig(seed=11, count=n)
  for i in range(n):
    r = gen_typed(cfg, i, ctx=NI_CONTEXT, salt="machine")
    if r is not None:
      yield r[0]


def test_generated_programs_are_safe_and_deterministic():
  """Progress and preservation on generated programs, and identical traces on re-runs."""
  finals = 0
  for m in _programs(60):
    out = compile_term(m, NI_CONTEXT)
    term = subst(out.term, INPUT, Const("true"))
    traces = []
    for _ in range(2):
      rules = []
      r = run(Config(term), FUEL, expected=out.type,
              trace=lambda i, rule, redex, cfg: rules.append((rule, cfg.term)))
      traces.append((rules, r))
    assert traces[0] == traces[1]
    r = traces[0][1]
    assert isinstance(r, (Final, BlameResult, Timeout)), r
    finals += isinstance(r, Final)
  assert finals > 10


def test_heap_only_grows():
  for m in _programs(30):
    out = compile_term(m, NI_CONTEXT)
    cfg = Config(subst(out.term, INPUT, Const("false")))
    for _ in range(FUEL):
      if is_final(cfg.term):
        break
      before = dict(cfg.heap.types)
      cfg, _, _ = step(cfg)
      assert all(cfg.heap.types[k] == t for k, t in before.items())

import pytest

from gifc import dynsec as d
from gifc.cc import terms as cc
from gifc.coercions import parse_seq
from gifc.compiler import compile_term
from gifc.harness.gen import NI_CONTEXT, GenConfig, gen_typed
from gifc.labels import BOOL, HIGH, LOW, STAR, UNIT, LType, Ref
from gifc.surface.syntax import INPUT
from gifc.vcoercions import IdBase, VCoercion

from conftest import compiled

TL, TH, FL, FH = (d.Const(k, l) for k in ("true", "false") for l in (LOW, HIGH))
BL, BH = LType(BOOL, LOW), LType(BOOL, HIGH)


def test_application_joins_the_function_label():
  r = d.run_dyn(d.App(d.Lam("x", d.Var("x"), LOW), TH))
  assert r.value == TH
  r = d.run_dyn(d.App(d.Lam("x", d.Var("x"), HIGH), TL))
  assert r.value == TH


def test_checked_allocation_under_high_pc():
  assert d.run_dyn(d.RefQ(LOW, TL, "p1"), pc=HIGH) == d.NSUError("p1")
  r = d.run_dyn(d.RefQ(HIGH, TL), pc=HIGH)
  assert r.value == d.Addr(0, HIGH, LOW)
  assert r.heap == {(HIGH, 0): TH}


def test_branch_result_carries_the_guard_label():
  assert d.run_dyn(d.If(TH, FL, TL)).value == FH


def test_sensitive_upgrade_is_rejected():
  write = d.Let("r", d.RefQ(LOW, TL), d.If(TH, d.AssignQ(d.Var("r"), FL, "p2"), d.Const("unit", LOW)))
  assert d.run_dyn(write) == d.NSUError("p2")
  ok = d.Let("r", d.RefQ(HIGH, TL), d.If(TH, d.AssignQ(d.Var("r"), FL), d.Const("unit", LOW)))
  assert isinstance(d.run_dyn(ok), d.DynFinal)


def test_dereference_joins_the_reference_label():
  m = d.Let("r", d.RefQ(LOW, TL), d.Deref(d.Prot(HIGH, d.Var("r"))))
  assert d.run_dyn(m).value == TH


def test_erasure_clauses():
  c = VCoercion(IdBase(BOOL), parse_seq("id(low);up"))
  assert d.erase(cc.Cast(cc.Const("true"), c), BH) == TL
  assert d.erase(cc.Const("true"), BH) == TH
  assign = cc.Assign(cc.Var("r"), cc.Const("false"), BOOL, HIGH, LOW)
  assert d.erase(assign, LType(UNIT, LOW)) == d.AssignQ(d.Var("r"), FH)
  assert isinstance(d.erase(cc.RefE(LOW, cc.Const("true")), LType(Ref(BL), LOW)), d.RefQ)


def test_erasure_needs_runtime_labels():
  with pytest.raises(ValueError):
    d.erase(cc.Const("true"), LType(BOOL, STAR))


def test_value_simulation():
  wrapped = cc.Cast(cc.Const("true"), VCoercion(IdBase(BOOL), parse_seq("id(low);up")))
  assert d.value_sim(TL, cc.Const("true"), BL)
  assert d.value_sim(TL, wrapped, BH)
  assert d.value_sim(TH, wrapped, BH)
  assert not d.value_sim(TH, cc.Const("true"), BL)
  assert not d.value_sim(FL, cc.Const("true"), BL)


def test_rendering():
  assert d.render_outcome(d.NSUError("p4")) == "NSU error at p4"
  assert d.render(d.Prot(HIGH, d.RefQ(LOW, TL))) == "(prot high (ref? low true@low))"


@pytest.mark.parametrize("value", ["true", "false"])
def test_nsu_fail_program_errors_in_both_languages(value):
  out = compiled("nsu_fail")
  erased = d.subst(d.erase(out.term, out.type), INPUT, d.Const(value, HIGH))
  assert isinstance(d.run_dyn(erased), d.NSUError)


def test_dynamic_language_is_noninterferent_on_generated_programs():
  cfg = GenConfig(seed=9, count=80)
  compared = 0
  for i in range(cfg.count):
    r = gen_typed(cfg, i, ctx=NI_CONTEXT, salt="dyn")
    if r is None:
      continue
    out = compile_term(r[0], NI_CONTEXT)
    erased = d.erase(out.term, out.type)
    runs = [d.run_dyn(d.subst(erased, INPUT, d.Const(k, HIGH)), fuel=20_000)
            for k in ("true", "false")]
    if all(isinstance(x, d.DynFinal) for x in runs):
      v1, v2 = (x.value for x in runs)
      if isinstance(v1, d.Const) and v1.label is LOW and v2.label is LOW:
        compared += 1
        assert v1 == v2
  assert compared > 5

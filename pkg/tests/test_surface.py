import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gifc.harness.gen import NI_CONTEXT, GenConfig, gen_typed
from gifc.labels import BOOL, HIGH, LOW, STAR, UNIT, Fun, LType, Ref, precision
from gifc.surface import (INPUT_TYPE, ParseError, SurfaceTypeError, annotation_sites,
                          default_context, erode, parse, parse_type, render, surface_precision,
                          typecheck_surface)
from gifc.surface.syntax import App, Const, Lam, Let, RefE, Var

from conftest import program_text

PROGRAMS = ["fconst_static", "fconst_star", "fid_static", "fid_star", "flip_static",
            "flip_star", "mix", "nsu_fail", "nsu_left", "nsu_right", "smix"]
CTX = default_context()


def test_parse_let_lambda_application():
  m = parse("let f = lam (b : Bool@*) . b in f (user-input)")
  assert isinstance(m, Let) and m.x == "f"
  assert m.bound == Lam(STAR, "b", LType(BOOL, STAR), Var("b"), LOW)
  assert m.body == App(Var("f"), Var("input"), "p1")
  assert typecheck_surface(Var("input"), CTX) == INPUT_TYPE


def test_literal_labels_default_to_low():
  assert parse("true") == Const("true", LOW)
  assert parse("ref high true") == RefE(HIGH, Const("true", LOW), "p1")


def test_publish_is_a_low_ascription():
  assert typecheck_surface(parse("publish true@low"), CTX) == LType(BOOL, LOW)
  with pytest.raises(SurfaceTypeError):
    typecheck_surface(parse("publish user-input"), CTX)


def test_type_syntax():
  assert parse_type("Ref Bool@* @ high") == LType(Ref(LType(BOOL, STAR)), HIGH)
  f = parse_type("(Bool@low -[high]-> Unit@*)@low")
  assert f == LType(Fun(LType(BOOL, LOW), HIGH, LType(UNIT, STAR)), LOW)


def test_strict_pc_rejects_missing_pc():
  with pytest.raises(ParseError):
    parse("lam (b : Bool@low) . b", strict_pc=True)
  parse("lam [low] (b : Bool@low) . b", strict_pc=True)


@pytest.mark.parametrize("src", ["lam (x : Bool) . x", "let = true in x", "true@medium", "(true"])
def test_parse_errors_carry_a_position(src):
  with pytest.raises(ParseError) as err:
    parse(src)
  assert ":" in str(err.value)


def test_comments_are_ignored():
  assert parse("-- note\ntrue -- trailing\n") == Const("true", LOW)


@pytest.mark.parametrize("name", ["fid_static", "flip_static"])
def test_rejected_programs(name):
  with pytest.raises(SurfaceTypeError) as err:
    typecheck_surface(parse(program_text(name)), CTX)
  assert err.value.rule


def test_fid_fails_at_the_application():
  with pytest.raises(SurfaceTypeError) as err:
    typecheck_surface(parse(program_text("fid_static")), CTX)
  assert err.value.rule == "app"


@pytest.mark.parametrize("name", ["nsu_left", "nsu_right"])
def test_nsu_pair_is_well_typed(name):
  # the branch on a high guard stamps the result
  assert typecheck_surface(parse(program_text(name)), CTX) == LType(UNIT, HIGH)


@pytest.mark.parametrize("name", PROGRAMS)
def test_render_round_trip(name):
  m = parse(program_text(name))
  assert parse(render(m)) == m
  assert render(parse(render(m))) == render(m)


def test_precision_examples():
  imprecise = parse("lam [low] (b : Bool@*) . b")
  precise = parse("lam [low] (b : Bool@high) . b")
  assert surface_precision(imprecise, precise)
  assert not surface_precision(precise, imprecise)
  left, right = parse(program_text("nsu_left")), parse(program_text("nsu_right"))
  assert surface_precision(left, right)
  assert not surface_precision(parse("true@low"), parse("true@high"))


def test_heap_policy_conditions():
  with pytest.raises(SurfaceTypeError):
    typecheck_surface(parse("let r = ref low true in if user-input then r := false else unit"), CTX)
  typecheck_surface(parse("let r = ref high true in if user-input then r := false else unit"), CTX)


def _generated(n, seed=7):
  cfg = GenConfig(seed=seed, count=n)
  out = []
  for i in range(n):
    r = gen_typed(cfg, i, ctx=NI_CONTEXT, salt="surface")
    if r is not None:
      out.append(r[0])
  return out


GENERATED = _generated(40)


@pytest.mark.parametrize("m", GENERATED[:20], ids=lambda m: str(len(render(m))))
def test_generated_programs_round_trip(m):
  assert parse(render(m)) == m


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(GENERATED), st.integers(0, 1 << 16))
def test_erosion_is_less_precise_and_still_typed(m, k):
  n = annotation_sites(m)
  if n == 0:
    return
  eroded = erode(m, k % n)
  assert surface_precision(eroded, m)
  assert surface_precision(m, m)
  a = typecheck_surface(m, NI_CONTEXT)
  b = typecheck_surface(eroded, NI_CONTEXT)
  assert precision(b, a)


def test_precision_is_transitive_along_an_erosion_chain():
  rng = random.Random(3)
  for m in GENERATED:
    chain = [m]
    for _ in range(3):
      n = annotation_sites(chain[-1])
      if n == 0:
        break
      chain.append(erode(chain[-1], rng.randrange(n)))
    assert surface_precision(chain[-1], chain[0])


def test_erode_rejects_out_of_range():
  with pytest.raises(IndexError):
    erode(parse("true"), 0)

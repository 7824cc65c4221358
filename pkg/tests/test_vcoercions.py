import pytest
from hypothesis import given
from hypothesis import strategies as st

from gifc import coercions as co
from gifc.cc.terms import Blame, Cast, Const
from gifc.coercions import IllTyped, enumerate_seqs, parse_seq
from gifc.labels import BOOL, HIGH, LOW, STAR, Fun, LType, Ref
from gifc.vcoercions import (FunC, IdBase, RefC, VCoercion, apply_cast, coerce_id, coerce_type,
                             compose_v, is_irreducible_v, stamp_val, vcoercion_type)

P = parse_seq
B = IdBase(BOOL)
T, F = Const("true"), Const("false")


def vc(text):
  return VCoercion(B, P(text))


def test_typing_examples():
  assert vcoercion_type(vc("id(low);up")) == (LType(BOOL, LOW), LType(BOOL, HIGH))
  bl = coerce_id(LType(BOOL, LOW))
  f = VCoercion(FunC(P("id(low)"), bl, bl), P("id(low)"))
  ft = LType(Fun(LType(BOOL, LOW), LOW, LType(BOOL, LOW)), LOW)
  assert vcoercion_type(f) == (ft, ft)
  with pytest.raises(IllTyped):
    vcoercion_type(VCoercion(RefC(bl, coerce_id(LType(BOOL, HIGH))), P("id(low)")))


def test_function_pc_cast_is_contravariant():
  bl = coerce_id(LType(BOOL, LOW))
  f = VCoercion(FunC(P("id(low);up"), bl, bl), P("id(low)"))
  src, tgt = vcoercion_type(f)
  assert src.raw.pc is HIGH and tgt.raw.pc is LOW


def test_coerce_id_examples():
  assert coerce_id(BOOL) == IdBase(BOOL)
  a = LType(BOOL, HIGH)
  assert coerce_id(Ref(a)) == RefC(coerce_id(a), coerce_id(a))
  assert coerce_id(LType(BOOL, LOW)) == vc("id(low)")


def test_coerce_type_examples():
  assert coerce_type(LType(BOOL, HIGH), LType(BOOL, STAR), "p") == vc("id(high);high!")
  assert coerce_type(LType(BOOL, STAR), LType(BOOL, LOW), "p") == vc("id(*);low?p")
  assert coerce_type(LType(BOOL, LOW), LType(BOOL, LOW), "p") == vc("id(low)")
  with pytest.raises(ValueError):
    coerce_type(LType(BOOL, HIGH), LType(BOOL, LOW), "p")


def test_coerce_type_reference_sides():
  a, b = LType(BOOL, LOW), LType(BOOL, STAR)
  c = coerce_type(LType(Ref(a), LOW), LType(Ref(b), LOW), "p")
  assert c.raw.write == coerce_type(b, a, "p")
  assert c.raw.read == coerce_type(a, b, "p")
  assert vcoercion_type(c) == (LType(Ref(a), LOW), LType(Ref(b), LOW))


def test_compose_examples():
  assert compose_v(vc("id(low);low!"), vc("id(*);high?p")) == vc("id(low);low!;id(*);high?p")
  a, b, c = (LType(BOOL, g) for g in (LOW, STAR, HIGH))
  r1 = coerce_type(LType(Ref(a), LOW), LType(Ref(b), LOW), "p")
  r2 = coerce_type(LType(Ref(b), LOW), LType(Ref(c), LOW), "q")
  out = compose_v(r1, r2)
  assert out.raw.write == compose_v(r2.raw.write, r1.raw.write)
  assert out.raw.read == compose_v(r1.raw.read, r2.raw.read)
  fa, fb = LType(Fun(a, LOW, a), LOW), LType(Fun(a, STAR, a), LOW)
  f1, f2 = coerce_type(fa, fb, "p"), coerce_type(fb, fa, "q")
  assert compose_v(f1, f2).raw.pc == co.compose(f2.raw.pc, f1.raw.pc)
  with pytest.raises(IllTyped):
    compose_v(vc("id(low)"), vc("id(high)"))


def test_apply_cast_examples():
  assert apply_cast(T, vc("id(low)")) == T
  up = Cast(T, vc("id(low);up;high!"))
  assert apply_cast(up, vc("id(*);low?p")) == Blame("p")
  inj = vc("id(low);low!")
  assert apply_cast(F, inj) == Cast(F, inj)


def test_stamp_examples():
  assert stamp_val(T, LType(BOOL, LOW), HIGH) == Cast(T, vc("id(low);up"))
  assert stamp_val(T, LType(BOOL, HIGH), HIGH) == T
  wrapped = Cast(F, vc("id(low);low!"))
  assert stamp_val(wrapped, LType(BOOL, STAR), HIGH) == Cast(F, vc("id(low);up;high!"))
  assert stamp_val(wrapped, LType(BOOL, STAR), LOW) == wrapped
  with pytest.raises(ValueError):
    stamp_val(T, LType(BOOL, STAR), HIGH)


SHORT = [s for s in enumerate_seqs(3) if co.seq_type(s)[0].specific]
ALL_SHORT = enumerate_seqs(3)


def _outcome_type_ok(out, tgt):
  if isinstance(out, Blame):
    return True
  if isinstance(out, Cast):
    return is_irreducible_v(out.c) and vcoercion_type(out.c)[1] == tgt
  return tgt.label.specific


def test_cast_then_cast_equals_composed_cast():
  """Exhaustive over base values and sequences of length at most 3. The second coercion
  starts with an identity, as every coercion the compiler or the machine builds does."""
  by_src = {}
  for d in ALL_SHORT:
    if isinstance(d.head, co.Bot):
      continue
    by_src.setdefault(co.seq_type(d)[0], []).append(d)
  checked = 0
  for v in (T, F):
    for c in SHORT:
      c1 = VCoercion(B, c)
      for d in by_src[co.seq_type(c)[1]]:
        d1 = VCoercion(B, d)
        first = apply_cast(v, c1)
        twice = first if isinstance(first, Blame) else apply_cast(first, d1)
        once = apply_cast(v, compose_v(c1, d1))
        assert twice == once, (v, c, d)
        assert _outcome_type_ok(once, vcoercion_type(d1)[1])
        checked += 1
  assert checked > 1000


def test_failure_on_the_right_absorbs_the_left():
  bot = VCoercion(B, co.seq(co.Bot("q", LOW, LOW)))
  assert compose_v(vc("id(low)"), bot).seq == bot.seq
  assert apply_cast(T, compose_v(vc("id(low)"), bot)) == Blame("q")


@given(st.sampled_from((T, F)), st.sampled_from(SHORT))
def test_results_are_values_at_the_target(v, c):
  out = apply_cast(v, VCoercion(B, c))
  assert _outcome_type_ok(out, LType(BOOL, co.seq_type(c)[1]))

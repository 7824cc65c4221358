import pytest
from hypothesis import given
from hypothesis import strategies as st

from gifc import coercions as co
from gifc.coercions import (Bot, IllTyped, coerce_label, compose,
                            enumerate_seqs, normalize, parse_seq, security, seq, seq_precision,
                            seq_type, stamp_bang_seq, stamp_seq)
from gifc.harness import exhaustive
from gifc.labels import HIGH, LOW, STAR, join, label_order, label_precision

P = parse_seq
SEQS = enumerate_seqs(4)
SINGLE = enumerate_seqs(4, ("p",))
NF_SPECIFIC = [s for s in SEQS if co.is_nf(s) and s.head.label.specific]
seqs = st.sampled_from(SEQS)


@pytest.mark.parametrize("text, ends", [
  ("id(low);low!", (LOW, STAR)),
  ("id(low);up;high!", (LOW, STAR)),
])
def test_seq_type(text, ends):
  assert seq_type(P(text)) == ends


def test_seq_type_rejects_missing_up():
  with pytest.raises(IllTyped):
    seq_type(P("id(low);high!"))


@pytest.mark.parametrize("text, want", [
  ("id(low);low!;high?p", "id(low);up"),
  ("id(low);up;high!;low?p", "bot(p,low,low)"),
  ("id(high);high!;high?p", "id(high)"),
])
def test_normalize_examples(text, want):
  assert normalize(P(text)) == P(want)


def test_rule_names_along_a_reduction():
  rules = [r for _, r in co.reduction(P("id(low);up;high!;low?p;low!"))]
  assert rules == ["xi", "xi-bot"]
  assert [r for _, r in co.reduction(P("id(low);low!;high?p"))] == ["?-up"]
  assert [r for _, r in co.reduction(P("id(high);id(high)"))] == ["id"]


def test_compose_examples():
  c = P("id(low);low!")
  assert compose(c, seq(Bot("p", STAR, LOW))) == seq(Bot("p", LOW, LOW))
  assert compose(c, P("id(*)")) == P("id(low);low!;id(*)")
  assert normalize(compose(c, P("id(*);high?p"))) == P("id(low);up")


def test_compose_rejects_mismatch():
  with pytest.raises(IllTyped):
    compose(P("id(low)"), P("id(high)"))


def test_stamp_examples():
  assert stamp_seq(P("id(low);low!"), HIGH) == P("id(low);up;high!")
  assert stamp_seq(P("id(high)"), HIGH) == P("id(high)")
  for c in NF_SPECIFIC:
    assert stamp_seq(c, LOW) == c
  assert stamp_bang_seq(P("id(low)"), HIGH) == P("id(low);up;high!")
  assert stamp_bang_seq(P("id(low);up"), HIGH) == P("id(low);up;high!")
  assert stamp_bang_seq(P("id(high);high!"), LOW) == P("id(high);high!")


@pytest.mark.parametrize("text, want", [
  ("id(low);up;high!", HIGH), ("id(low)", LOW), ("id(high);high!", HIGH),
])
def test_security(text, want):
  assert security(P(text)) is want


def test_seq_precision_examples():
  assert seq_precision(P("id(low);low!"), P("id(low);up;high!"))
  assert seq_precision(P("id(low);low!"), P("bot(p,low,low)"))
  assert not seq_precision(P("id(high)"), P("id(low)"))


def test_coerce_label_examples():
  assert coerce_label(STAR, LOW, "p") == P("id(*);low?p")
  assert coerce_label(HIGH, STAR, "p") == P("id(high);high!")
  assert coerce_label(LOW, LOW, "p") == P("id(low)")
  assert coerce_label(LOW, HIGH, "p") == P("id(low);up")
  with pytest.raises(ValueError):
    coerce_label(HIGH, LOW, "p")


def test_text_round_trip():
  for s in SEQS:
    assert P(str(s)) == s


def test_normal_forms_are_exactly_the_irreducible_shapes():
  nfs = {str(s) for s in SEQS if co.is_nf(s)}
  assert nfs == {
    "id(low)", "id(high)", "id(*)", "id(low);low!", "id(high);high!", "id(low);up",
    "id(low);up;high!", "id(*);low?p", "id(*);low?q", "id(*);high?p", "id(*);high?q",
    "id(*);low?p;low!", "id(*);low?q;low!", "id(*);high?p;high!", "id(*);high?q;high!",
    "id(*);low?p;up", "id(*);low?q;up", "id(*);low?p;up;high!", "id(*);low?q;up;high!",
  }


@pytest.mark.parametrize("check", [
  exhaustive.check_normalization, exhaustive.check_explicit_flow, exhaustive.check_implicit_flow,
])
def test_sequence_properties_by_exhaustion(check):
  result = check(SEQS)
  assert result.checked > 0
  assert result.counterexamples == []


def test_normalization_up_to_length_six():
  result = exhaustive.check_normalization(enumerate_seqs(6))
  assert result.checked == 10801
  assert result.counterexamples == []


@pytest.fixture(scope="module")
def pairs():
  return exhaustive.related_pairs(SINGLE)


@pytest.mark.parametrize("check", [
  exhaustive.check_monotonic, exhaustive.check_catch_up, exhaustive.check_simulation,
  exhaustive.check_stamp_precision,
])
def test_precision_properties_by_exhaustion(pairs, check):
  result = check(pairs)
  assert result.checked > 0
  assert result.counterexamples == []


def test_endpoint_grouping_misses_nothing(pairs):
  found = {(c, d) for c in SINGLE for d in SINGLE if seq_precision(c, d)}
  assert found == set(pairs)


def test_precision_implies_endpoint_precision(pairs):
  for c, d in pairs:
    (cs, ct), (ds, dt) = seq_type(c), seq_type(d)
    assert label_precision(cs, ds) and label_precision(ct, dt)


@given(seqs)
def test_normalize_preserves_endpoints(s):
  assert seq_type(normalize(s)) == seq_type(s)


@given(seqs)
def test_normalize_idempotent(s):
  assert normalize(normalize(s)) == normalize(s)


@given(st.sampled_from(NF_SPECIFIC), seqs)
def test_composition_never_lowers_security(c, d):
  if seq_type(c)[1] is not seq_type(d)[0]:
    return
  out = normalize(compose(c, d))
  if not out.is_bot:
    assert label_order(security(c), security(out))


@given(st.sampled_from(NF_SPECIFIC), st.sampled_from((LOW, HIGH)))
def test_stamping_joins_security(c, l):
  assert security(stamp_seq(c, l)) is join(security(c), l)
  assert security(stamp_bang_seq(c, l)) is join(security(c), l)

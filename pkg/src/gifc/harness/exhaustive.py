"""Exhaustive checks of the coercion-sequence metatheory over small sequences."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .. import coercions as co
from ..coercions import Seq
from ..labels import SPECIFIC, join, label_order, label_precision


@dataclass
class Check:
  name: str
  checked: int = 0
  counterexamples: list = field(default_factory=list)

  @property
  def ok(self) -> bool:
    return self.checked > 0 and not self.counterexamples

  def fail(self, *witness) -> None:
    if len(self.counterexamples) < 20:
      self.counterexamples.append(tuple(str(w) for w in witness))
    else:
      self.counterexamples.append(None)


def _length(s: Seq) -> int:
  return 1 + len(s.tail)


def _nf_specific(s: Seq) -> bool:
  return co.is_nf(s) and s.head.label.specific


def _chain(s: Seq) -> list[Seq]:
  out = [s]
  for t, _ in co.reduction(s):
    out.append(t)
  return out


def check_normalization(seqs: list[Seq]) -> Check:
  """Termination within length² steps at a normal form or blame with the same endpoints,
  and the same result whichever prefix is normalized first."""
  chk = Check("normalization")
  for s in seqs:
    chk.checked += 1
    steps = list(co.reduction(s))
    end = steps[-1][0] if steps else s
    ends = co.seq_type(s)
    if len(steps) > _length(s) ** 2:
      chk.fail(s, f"{len(steps)} steps")
    if not (co.is_nf(end) or end.is_bot):
      chk.fail(s, end, "stuck")
    if co.seq_type(end) != ends:
      chk.fail(s, end, "endpoints changed")
    if co.step_seq(end) is not None:
      chk.fail(s, end, "final sequence still steps")
    for k in range(len(s.tail)):
      prefix = Seq(s.head, s.tail[:k + 1])
      rest = s.tail[k + 1:]
      norm = co.normalize(prefix)
      again = co.normalize(Seq(norm.head, norm.tail + rest))
      if again != end:
        chk.fail(s, k, again, end)
  return chk


def check_explicit_flow(seqs: list[Seq]) -> Check:
  """NF c, and c;d normalizing to NF c' implies |c| ⪯ |c'|."""
  chk = Check("explicit flow")
  by_src = defaultdict(list)
  for d in seqs:
    by_src[co.seq_type(d)[0]].append(d)
  for c in seqs:
    if not _nf_specific(c):
      continue
    for d in by_src[co.seq_type(c)[1]]:
      out = co.normalize(co.compose(c, d))
      if out.is_bot:
        continue
      chk.checked += 1
      if not label_order(co.security(c), co.security(out)):
        chk.fail(c, d, out)
  return chk


def check_implicit_flow(seqs: list[Seq]) -> Check:
  """|stamp c l| = |c| ∨ l = |stamp! c l| for NF c."""
  chk = Check("implicit flow")
  for c in seqs:
    if not _nf_specific(c):
      continue
    for l in SPECIFIC:
      chk.checked += 1
      want = join(co.security(c), l)
      for stamped in (co.stamp_seq(c, l), co.stamp_bang_seq(c, l)):
        if not co.is_nf(stamped) or co.security(stamped) is not want:
          chk.fail(c, l, stamped)
  return chk


def related_pairs(seqs: list[Seq]) -> list[tuple[Seq, Seq]]:
  """All (c, d) with c ⊑ d. Endpoint precision is necessary, so pairs are grouped by it."""
  groups = defaultdict(list)
  for s in seqs:
    groups[co.seq_type(s)].append(s)
  out = []
  for (cs, ct), left in groups.items():
    for (ds, dt), right in groups.items():
      if not (label_precision(cs, ds) and label_precision(ct, dt)):
        continue
      out.extend((c, d) for c in left for d in right if co.seq_precision(c, d))
  return out


def check_monotonic(pairs) -> Check:
  chk = Check("security monotonic in precision")
  for c, d in pairs:
    if _nf_specific(c) and _nf_specific(d):
      chk.checked += 1
      if not label_order(co.security(c), co.security(d)):
        chk.fail(c, d)
  return chk


def check_catch_up(pairs) -> Check:
  """NF d and c ⊑ d: some reduct of c is still below d."""
  chk = Check("catching up")
  for c, d in pairs:
    if co.is_nf(d):
      chk.checked += 1
      if not any(co.seq_precision(c2, d) for c2 in _chain(c)):
        chk.fail(c, d)
  return chk


def check_simulation(pairs) -> Check:
  """c ⊑ d and d → d': some reduct of c is below d'."""
  chk = Check("simulation")
  for c, d in pairs:
    r = co.step_seq(d)
    if r is None:
      continue
    chk.checked += 1
    d2 = r[0]
    if not any(co.seq_precision(c2, d2) for c2 in _chain(c)):
      chk.fail(c, d, d2)
  return chk


def check_stamp_precision(pairs) -> Check:
  chk = Check("stamping preserves precision")
  for c, d in pairs:
    if not (_nf_specific(c) and _nf_specific(d)):
      continue
    for l in SPECIFIC:
      chk.checked += 1
      if not co.seq_precision(co.stamp_seq(c, l), co.stamp_seq(d, l)):
        chk.fail(c, d, "stamp", l)
    for l1 in SPECIFIC:
      for l2 in SPECIFIC:
        if not label_order(l1, l2):
          continue
        chk.checked += 1
        if not co.seq_precision(co.stamp_bang_seq(c, l1), co.stamp_bang_seq(d, l2)):
          chk.fail(c, d, "stamp!", l1, l2)
        if not co.seq_precision(co.stamp_bang_seq(c, l1), co.stamp_seq(d, l2)):
          chk.fail(c, d, "stamp!/stamp", l1, l2)
  return chk


def run_all(max_len: int = 4) -> list[Check]:
  """Normalization and the flow properties over two blame labels; the precision ones over one,
  since renaming blame labels is a symmetry of every rule involved."""
  seqs = co.enumerate_seqs(max_len, ("p", "q"))
  single = co.enumerate_seqs(max_len, ("p",))
  pairs = related_pairs(single)
  return [
    check_normalization(seqs),
    check_explicit_flow(seqs),
    check_implicit_flow(seqs),
    check_monotonic(pairs),
    check_catch_up(pairs),
    check_simulation(pairs),
    check_stamp_precision(pairs),
  ]


__all__ = ["Check", "run_all", "related_pairs", "check_normalization", "check_explicit_flow",
           "check_implicit_flow", "check_monotonic", "check_catch_up", "check_simulation",
           "check_stamp_precision"]

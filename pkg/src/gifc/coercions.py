"""Coercions on security labels and sequences of them."""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Union

from . import mutation
from .labels import HIGH, LOW, STAR, Label, label_csub, label_precision


class IllTyped(Exception):
  pass


@dataclass(frozen=True)
class Id:
  label: Label

  def __str__(self) -> str:
    return f"id({self.label})"


@dataclass(frozen=True)
class Up:
  def __str__(self) -> str:
    return "up"


@dataclass(frozen=True)
class Inject:
  label: Label

  def __str__(self) -> str:
    return f"{self.label}!"


@dataclass(frozen=True)
class Project:
  label: Label
  blame: str

  def __str__(self) -> str:
    return f"{self.label}?{self.blame}"


@dataclass(frozen=True)
class Bot:
  blame: str
  src: Label
  tgt: Label

  def __str__(self) -> str:
    return f"bot({self.blame},{self.src},{self.tgt})"


LCoercion = Union[Id, Up, Inject, Project]


def endpoints(c: LCoercion) -> tuple[Label, Label]:
  match c:
    case Id(g):
      return g, g
    case Up():
      return LOW, HIGH
    case Inject(l):
      return l, STAR
    case Project(l, _):
      return STAR, l
  raise TypeError(c)


@dataclass(frozen=True)
class Seq:
  head: Union[Id, Bot]
  tail: tuple[LCoercion, ...] = ()

  def __str__(self) -> str:
    return ";".join(str(c) for c in (self.head, *self.tail))

  def __hash__(self) -> int:
    h = self.__dict__.get("_hash")
    if h is None:
      h = hash((self.head, self.tail))
      object.__setattr__(self, "_hash", h)
    return h

  @property
  def is_bot(self) -> bool:
    return isinstance(self.head, Bot) and not self.tail

  def then(self, *cs: LCoercion) -> Seq:
    return Seq(self.head, self.tail + cs)

  def init(self) -> Seq:
    return Seq(self.head, self.tail[:-1])

  @property
  def src(self) -> Label:
    return seq_type(self)[0]

  @property
  def tgt(self) -> Label:
    return seq_type(self)[1]


def seq(head, *tail) -> Seq:
  return Seq(head, tuple(tail))


def ident(g: Label) -> Seq:
  return Seq(Id(g))


@lru_cache(maxsize=None)
def seq_type(s: Seq) -> tuple[Label, Label]:
  if isinstance(s.head, Bot):
    src, cur = s.head.src, s.head.tgt
  else:
    src = cur = s.head.label
  for c in s.tail:
    a, b = endpoints(c)
    if a is not cur:
      raise IllTyped(f"{s}: {c} expects {a}, got {cur}")
    cur = b
  return src, cur


def well_typed(s: Seq) -> bool:
  try:
    seq_type(s)
  except IllTyped:
    return False
  return True


# Reduction.

def step_seq(s: Seq) -> tuple[Seq, str] | None:
  """One leftmost reduction step, or None when no rule applies."""
  if not s.tail:
    return None
  prefix, last = s.init(), s.tail[-1]
  inner = step_seq(prefix)
  if inner is not None:
    return inner[0].then(last), "xi"
  if isinstance(prefix.head, Bot):
    b = prefix.head
    return Seq(Bot(b.blame, b.src, endpoints(last)[1])), "xi-bot"
  if isinstance(last, Id):
    return prefix, "id"
  if isinstance(last, Project) and prefix.tail and isinstance(prefix.tail[-1], Inject):
    injected, base = prefix.tail[-1].label, prefix.init()
    if injected is last.label:
      return base, "?-id"
    if injected is LOW and not mutation.active("up-blames"):
      return base.then(Up()), "?-up"
    return Seq(Bot(last.blame, seq_type(s)[0], LOW)), "?-bot"
  return None


def reduction(s: Seq) -> Iterator[tuple[Seq, str]]:
  while (r := step_seq(s)) is not None:
    yield r
    s = r[0]


def normalize(s: Seq) -> Seq:
  seq_type(s)
  if mutation.any_active():
    return _normalize.__wrapped__(s)
  return _normalize(s)


@lru_cache(maxsize=65536)
def _normalize(s: Seq) -> Seq:
  while (r := step_seq(s)) is not None:
    s = r[0]
  return s


def is_nf(s: Seq) -> bool:
  if isinstance(s.head, Bot):
    return False
  cur, rest = s.head.label, s.tail
  if cur is STAR:
    if not rest:
      return True
    if not isinstance(rest[0], Project):
      return False
    cur, rest = rest[0].label, rest[1:]
  if cur is LOW:
    return rest in ((), (Inject(LOW),), (Up(),), (Up(), Inject(HIGH)))
  return rest in ((), (Inject(HIGH),))


def is_irreducible(s: Seq) -> bool:
  """Normal form other than a bare identity."""
  return is_nf(s) and bool(s.tail)


def _need_nf_specific(s: Seq) -> Label:
  if not is_nf(s) or not s.head.label.specific:
    raise ValueError(f"expected a normal form with specific source: {s}")
  return s.head.label


def security(s: Seq) -> Label:
  src = _need_nf_specific(s)
  return HIGH if Up() in s.tail else src


# Composition and stamping.

def compose(c1: Seq, c2: Seq) -> Seq:
  _, t1 = seq_type(c1)
  s2, t2 = seq_type(c2)
  if t1 is not s2:
    raise IllTyped(f"cannot compose {c1} with {c2}")
  if isinstance(c2.head, Bot):
    return Seq(Bot(c2.head.blame, seq_type(c1)[0], c2.head.tgt), c2.tail)
  return Seq(c1.head, c1.tail + (c2.head,) + c2.tail)


_UP = seq(Id(LOW), Up())
_UP_INJ = seq(Id(LOW), Up(), Inject(HIGH))
_HIGH_INJ = seq(Id(HIGH), Inject(HIGH))


def stamp_seq(s: Seq, l: Label) -> Seq:
  src = _need_nf_specific(s)
  if not l.specific:
    raise ValueError("stamp by the unknown label")
  if l is LOW or src is HIGH:
    return s
  if s.tail and isinstance(s.tail[-1], Inject):
    return _UP_INJ
  return _UP


def stamp_bang_seq(s: Seq, l: Label) -> Seq:
  src = _need_nf_specific(s)
  if not l.specific:
    raise ValueError("stamp by the unknown label")
  if l is HIGH:
    return _UP_INJ if src is LOW else _HIGH_INJ
  tgt = seq_type(s)[1]
  return s if tgt is STAR else s.then(Inject(tgt))


def coerce_label(g1: Label, g2: Label, p: str) -> Seq:
  if not label_csub(g1, g2):
    raise ValueError(f"{g1} is not consistent with {g2}")
  if g1 is g2:
    return ident(g1)
  if g2 is STAR:
    return seq(Id(g1), Inject(g1))
  if g1 is STAR:
    return seq(Id(STAR), Project(g2, p))
  return _UP


# Precision.

def _prec_single(c: LCoercion, d: LCoercion) -> bool:
  (a1, b1), (a2, b2) = endpoints(c), endpoints(d)
  return label_precision(a1, a2) and label_precision(b1, b2)


def _prec_single_label(c: LCoercion, g: Label) -> bool:
  return all(label_precision(e, g) for e in endpoints(c))


def _prec_label_single(g: Label, d: LCoercion) -> bool:
  return all(label_precision(g, e) for e in endpoints(d))


@lru_cache(maxsize=None)
def seq_precision(c: Seq, d: Seq) -> bool:
  try:
    (cs, ct), (ds, dt) = seq_type(c), seq_type(d)
  except IllTyped:
    return False
  if d.is_bot and label_precision(cs, ds) and label_precision(ct, dt):
    return True
  if not c.tail and not d.tail:
    if isinstance(c.head, Id) and isinstance(d.head, Id):
      return label_precision(c.head.label, d.head.label)
    return False
  if c.tail and d.tail and _prec_single(c.tail[-1], d.tail[-1]) \
      and seq_precision(c.init(), d.init()):
    return True
  if c.tail and _prec_single_label(c.tail[-1], dt) and seq_precision(c.init(), d):
    return True
  if d.tail and _prec_label_single(ct, d.tail[-1]) and seq_precision(c, d.init()):
    return True
  return False


def seq_precision_left(c: Seq, g: Label) -> bool:
  """c ⊑ g: the sequence is below the label on the right."""
  if isinstance(c.head, Bot):
    return False
  if not label_precision(c.head.label, g):
    return False
  return all(_prec_single_label(x, g) for x in c.tail)


def seq_precision_right(g: Label, d: Seq) -> bool:
  """g ⊑ d: the label on the left is below the sequence."""
  if isinstance(d.head, Bot):
    if d.tail:
      return False
    return label_precision(g, d.head.src) and label_precision(g, d.head.tgt)
  if not label_precision(g, d.head.label):
    return False
  return all(_prec_label_single(g, x) for x in d.tail)


# Debug parser for the textual form, used by tests.

_TOKEN = re.compile(r"id\((low|high|\*)\)|up|(low|high|\*)!|(low|high)\?(\w+)"
                    r"|bot\((\w+),(low|high|\*),(low|high|\*)\)")


def parse_seq(text: str) -> Seq:
  parts = [p.strip() for p in text.split(";")]
  out = []
  for part in parts:
    m = _TOKEN.fullmatch(part)
    if m is None:
      raise ValueError(f"bad coercion {part!r}")
    if part.startswith("id("):
      out.append(Id(Label(m.group(1))))
    elif part == "up":
      out.append(Up())
    elif m.group(2):
      out.append(Inject(Label(m.group(2))))
    elif m.group(3):
      out.append(Project(Label(m.group(3)), m.group(4)))
    else:
      out.append(Bot(m.group(5), Label(m.group(6)), Label(m.group(7))))
  if not isinstance(out[0], (Id, Bot)) or any(isinstance(c, Bot) for c in out[1:]):
    raise ValueError(f"bad sequence head in {text!r}")
  return Seq(out[0], tuple(out[1:]))


def enumerate_seqs(max_len: int, blames: tuple[str, ...] = ("p", "q")) -> list[Seq]:
  """Every well-typed sequence with at most max_len coercions, head included."""
  labels = (LOW, HIGH, STAR)
  singles: list[LCoercion] = [Id(g) for g in labels] + [Up()]
  singles += [Inject(l) for l in (LOW, HIGH)]
  singles += [Project(l, p) for l in (LOW, HIGH) for p in blames]
  frontier = [Seq(Id(g)) for g in labels]
  frontier += [Seq(Bot(p, a, b)) for p in blames for a in labels for b in labels]
  out = list(frontier)
  for _ in range(max_len - 1):
    nxt = []
    for s in frontier:
      cur = seq_type(s)[1]
      nxt.extend(s.then(c) for c in singles if endpoints(c)[0] is cur)
    out.extend(nxt)
    frontier = nxt
  return out

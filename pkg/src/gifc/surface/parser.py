"""Tokenizer and recursive-descent parser for the surface language."""
from __future__ import annotations

import re
from dataclasses import dataclass

from ..labels import BOOL, LOW, STAR, UNIT, Fun, Label, LType, Ref
from .syntax import (INPUT, Ann, App, Assign, Const, Deref, If, Lam, Let, RefE, Span, Term,
                     Var, number_blames)


class ParseError(Exception):
  def __init__(self, span: Span, message: str):
    super().__init__(f"{span[0]}:{span[1]}: parse error: {message}")
    self.span = span


@dataclass(frozen=True)
class Token:
  kind: str
  text: str
  span: Span


KEYWORDS = {"lam", "if", "then", "else", "let", "in", "ref", "unit", "true", "false",
            "low", "high", "Unit", "Bool", "Ref", "publish"}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+|--[^\n]*)
  | (?P<nl>\n)
  | (?P<input>user-input)
  | (?P<sym>:=|-\[|\]->|->|[()\[\]@:.!=*])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)


def tokenize(src: str) -> list[Token]:
  out, line, col, pos = [], 1, 1, 0
  while pos < len(src):
    m = _TOKEN_RE.match(src, pos)
    if m is None:
      raise ParseError((line, col), f"unexpected character {src[pos]!r}")
    kind, text = m.lastgroup, m.group()
    if kind == "nl":
      line, col = line + 1, 1
    else:
      if kind == "ident" and text in KEYWORDS:
        kind = "kw"
      if kind != "ws":
        out.append(Token(kind, text, (line, col)))
      col += len(text)
    pos = m.end()
  out.append(Token("eof", "", (line, col)))
  return out


_LABELS = {"low": Label.LOW, "high": Label.HIGH, "*": STAR}


class Parser:
  def __init__(self, src: str, strict_pc: bool = False):
    self.toks = tokenize(src)
    self.i = 0
    self.strict_pc = strict_pc

  # token helpers

  @property
  def tok(self) -> Token:
    return self.toks[self.i]

  def at(self, *texts: str) -> bool:
    return self.tok.kind != "eof" and self.tok.text in texts

  def advance(self) -> Token:
    t = self.tok
    self.i += 1
    return t

  def expect(self, text: str) -> Token:
    if not self.at(text):
      raise ParseError(self.tok.span, f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
    return self.advance()

  def ident(self) -> str:
    if self.tok.kind != "ident":
      raise ParseError(self.tok.span, f"expected identifier, found {self.tok.text!r}")
    return self.advance().text

  # labels and types

  def label(self, allow_star: bool = True) -> Label:
    if self.tok.text in _LABELS and self.tok.kind != "ident":
      t = self.advance()
      if t.text == "*" and not allow_star:
        raise ParseError(t.span, "the unknown label is not a runtime label")
      return _LABELS[t.text]
    raise ParseError(self.tok.span, f"expected a label, found {self.tok.text!r}")

  def at_label(self) -> bool:
    return self.tok.kind == "kw" and self.tok.text in ("low", "high")

  def ltype(self) -> LType:
    raw = self.rawtype()
    self.expect("@")
    return LType(raw, self.label())

  def rawtype(self):
    t = self.tok
    if self.at("Unit"):
      self.advance()
      return UNIT
    if self.at("Bool"):
      self.advance()
      return BOOL
    if self.at("Ref"):
      self.advance()
      return Ref(self.ltype())
    if self.at("("):
      self.advance()
      dom = self.ltype()
      if self.at("-["):
        self.advance()
        pc = self.label()
        self.expect("]->")
      elif self.at("->"):
        if self.strict_pc:
          raise ParseError(self.tok.span, "function type without a pc label")
        self.advance()
        pc = STAR
      else:
        raise ParseError(self.tok.span, "expected '-[' or '->' in function type")
      cod = self.ltype()
      self.expect(")")
      return Fun(dom, pc, cod)
    raise ParseError(t.span, f"expected a type, found {t.text!r}")

  # terms

  def program(self) -> Term:
    m = self.expr()
    if self.tok.kind != "eof":
      raise ParseError(self.tok.span, f"unexpected {self.tok.text!r}")
    return m

  def expr(self) -> Term:
    t = self.tok
    if self.at("lam"):
      self.advance()
      if self.at("["):
        self.advance()
        pc = self.label()
        self.expect("]")
      elif self.strict_pc:
        raise ParseError(t.span, "lambda without a pc label")
      else:
        pc = STAR
      self.expect("(")
      x = self.ident()
      self.expect(":")
      ann = self.ltype()
      self.expect(")")
      self.expect(".")
      body = self.expr()
      label = LOW
      if self.at("@"):
        self.advance()
        label = self.label(allow_star=False)
      return Lam(pc, x, ann, body, label, span=t.span)
    if self.at("if"):
      self.advance()
      c = self.expr()
      self.expect("then")
      a = self.expr()
      self.expect("else")
      b = self.expr()
      return If(c, a, b, span=t.span)
    if self.at("let"):
      self.advance()
      x = self.ident()
      ann = None
      if self.at(":"):
        self.advance()
        ann = self.ltype()
      self.expect("=")
      bound = self.expr()
      self.expect("in")
      body = self.expr()
      if ann is not None:
        bound = Ann(bound, ann, span=bound.span)
      return Let(x, bound, body, span=t.span)
    lhs = self.app()
    if self.at(":="):
      self.advance()
      return Assign(lhs, self.expr(), span=t.span)
    return lhs

  def app(self) -> Term:
    m = self.prefix()
    while self.starts_prefix():
      m = App(m, self.prefix(), span=m.span)
    return m

  def starts_prefix(self) -> bool:
    t = self.tok
    if t.kind in ("ident", "input"):
      return True
    return t.text in ("unit", "true", "false", "(", "!", "ref", "publish") and t.kind != "eof"

  def prefix(self) -> Term:
    t = self.tok
    if self.at("!"):
      self.advance()
      return Deref(self.prefix(), span=t.span)
    if self.at("ref"):
      self.advance()
      label = self.label(allow_star=False) if self.at_label() or self.at("*") else LOW
      return RefE(label, self.prefix(), span=t.span)
    if self.at("publish"):
      self.advance()
      return Ann(self.prefix(), LType(BOOL, LOW), span=t.span)
    return self.atom()

  def atom(self) -> Term:
    t = self.tok
    if t.kind == "ident":
      self.advance()
      return Var(t.text, span=t.span)
    if t.kind == "input":
      self.advance()
      if self.at("(") and self.toks[self.i + 1].text == ")":
        self.i += 2
      return Var(INPUT, span=t.span)
    if self.at("unit", "true", "false"):
      self.advance()
      label = LOW
      if self.at("@"):
        self.advance()
        label = self.label(allow_star=False)
      return Const(t.text, label, span=t.span)
    if self.at("("):
      self.advance()
      m = self.expr()
      if self.at(":"):
        self.advance()
        ann = self.ltype()
        self.expect(")")
        return Ann(m, ann, span=t.span)
      self.expect(")")
      return m
    raise ParseError(t.span, f"unexpected {t.text or 'end of input'!r}")


def parse(src: str, strict_pc: bool = False) -> Term:
  return number_blames(Parser(src, strict_pc).program())


def parse_type(src: str) -> LType:
  p = Parser(src)
  a = p.ltype()
  if p.tok.kind != "eof":
    raise ParseError(p.tok.span, f"unexpected {p.tok.text!r}")
  return a

"""Line-oriented text format for knowledge bases.

Statements, one per line (``#`` starts a comment, blank lines ignored)::

    class Name
    subclass Child Parent
    annotation ClassName key free text to end of line
    objprop Name domain=C range=C [functional] [transitive] [symmetric]
            [reflexive] [inverse=P] [expands_to=Q]
    dataprop Name domain=C type=float
    disjoint A B
    individual Name [: C1,C2]
    assert Subject prop Object
    data Subject prop 1.25
    rule name: Atom ^ Atom ^ ... -> Atom

Identifiers match ``[A-Za-z_][A-Za-z0-9_]*``. Names must be declared before
use, except that ``inverse=`` and ``expands_to=`` targets may be declared
later in the document (they are checked once the whole document is read).

Serialization is canonical: statements are grouped by kind in a fixed order
and sorted alphabetically within each kind, and floats are written with
``repr``, so equal knowledge bases serialize to identical bytes. Comments are
not preserved. Individual lines list every known class membership, so
serializing a reasoned knowledge base keeps its derived facts (they reparse
as plain asserted facts; provenance is not part of the format).
"""

from __future__ import annotations

import re

from ..errors import KbParseError
from .model import (
    BUILTIN_OPS,
    CHARACTERISTICS,
    Builtin,
    ClassAssertion,
    ClassAtom,
    DataAtom,
    KnowledgeBase,
    ObjectAtom,
    Rule,
    RuleAtom,
    Term,
    is_variable,
)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_ATOM = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*\(([^()]*)\)\s*\Z")

HEADER_COMMENT = "# tierkb knowledge base"


def _check_ident(name: str, line: int) -> str:
    if not _IDENT.match(name):
        raise KbParseError(f"invalid identifier {name!r}", line=line, token=name)
    return name


def _parse_term(text: str, line: int) -> Term:
    text = text.strip()
    if not text:
        raise KbParseError("empty term", line=line)
    if text.startswith("?"):
        name = text[1:]
        _check_ident(name, line)
        return "?" + name
    if _IDENT.match(text):
        return text
    try:
        return float(text)
    except ValueError:
        raise KbParseError(f"invalid term {text!r}", line=line, token=text) from None


def _parse_atom(text: str, kb: KnowledgeBase, line: int) -> RuleAtom:
    match = _ATOM.match(text)
    if match is None:
        raise KbParseError(f"malformed atom {text.strip()!r}", line=line)
    name, args_text = match.group(1), match.group(2)
    args = [a for a in args_text.split(",")] if args_text.strip() else []
    terms = [_parse_term(a, line) for a in args]
    if name in kb.classes:
        if len(terms) != 1:
            raise KbParseError(f"class atom {name!r} takes one argument", line=line, token=name)
        if isinstance(terms[0], float):
            raise KbParseError(f"class atom {name!r} applied to a number", line=line, token=name)
        return ClassAtom(cls=name, term=terms[0])
    if name in kb.object_properties:
        if len(terms) != 2:
            raise KbParseError(f"object atom {name!r} takes two arguments", line=line, token=name)
        for t in terms:
            if isinstance(t, float):
                raise KbParseError(
                    f"object atom {name!r} applied to a number", line=line, token=name
                )
        return ObjectAtom(prop=name, subject=terms[0], obj=terms[1])
    if name in kb.data_properties:
        if len(terms) != 2:
            raise KbParseError(f"data atom {name!r} takes two arguments", line=line, token=name)
        if isinstance(terms[0], float):
            raise KbParseError(f"data atom {name!r} subject is a number", line=line, token=name)
        if isinstance(terms[1], str) and not is_variable(terms[1]):
            raise KbParseError(
                f"data atom {name!r} value must be a number or variable", line=line, token=name
            )
        return DataAtom(prop=name, subject=terms[0], value=terms[1])
    if name in BUILTIN_OPS:
        if len(terms) != 2:
            raise KbParseError(f"builtin {name!r} takes two arguments", line=line, token=name)
        return Builtin(op=name, left=terms[0], right=terms[1])
    raise KbParseError(f"unknown atom name {name!r}", line=line, token=name)


def _split_kv(token: str, key: str, line: int) -> str:
    if not token.startswith(key + "="):
        raise KbParseError(f"expected {key}=..., got {token!r}", line=line, token=token)
    return token[len(key) + 1 :]


def parse_kb(text: str) -> KnowledgeBase:
    """Parse a knowledge-base document; raises KbParseError with the
    offending line number on malformed input."""
    kb = KnowledgeBase()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        keyword = tokens[0]
        try:
            if keyword == "class":
                if len(tokens) != 2:
                    raise KbParseError("class takes one name", line=line_no)
                kb.add_class(_check_ident(tokens[1], line_no))
            elif keyword == "subclass":
                if len(tokens) != 3:
                    raise KbParseError("subclass takes child and parent", line=line_no)
                kb.add_subclass(_check_ident(tokens[1], line_no), _check_ident(tokens[2], line_no))
            elif keyword == "annotation":
                if len(tokens) < 4:
                    raise KbParseError("annotation takes class, key, value", line=line_no)
                kb.annotate_class(
                    _check_ident(tokens[1], line_no),
                    _check_ident(tokens[2], line_no),
                    " ".join(tokens[3:]),
                )
            elif keyword == "objprop":
                if len(tokens) < 4:
                    raise KbParseError("objprop needs name, domain=, range=", line=line_no)
                name = _check_ident(tokens[1], line_no)
                domain = _check_ident(_split_kv(tokens[2], "domain", line_no), line_no)
                range_ = _check_ident(_split_kv(tokens[3], "range", line_no), line_no)
                characteristics = []
                inverse = None
                expands_to = None
                for token in tokens[4:]:
                    if token in CHARACTERISTICS:
                        characteristics.append(token)
                    elif token.startswith("inverse="):
                        inverse = _check_ident(token[len("inverse=") :], line_no)
                    elif token.startswith("expands_to="):
                        expands_to = _check_ident(token[len("expands_to=") :], line_no)
                    else:
                        raise KbParseError(
                            f"unknown objprop flag {token!r}", line=line_no, token=token
                        )
                kb.add_object_property(
                    name,
                    domain,
                    range_,
                    characteristics=characteristics,
                    inverse=inverse,
                    expands_to=expands_to,
                )
            elif keyword == "dataprop":
                if len(tokens) != 4:
                    raise KbParseError("dataprop needs name, domain=, type=", line=line_no)
                name = _check_ident(tokens[1], line_no)
                domain = _check_ident(_split_kv(tokens[2], "domain", line_no), line_no)
                value_type = _split_kv(tokens[3], "type", line_no)
                if value_type != "float":
                    raise KbParseError(
                        f"unsupported data type {value_type!r}", line=line_no, token=value_type
                    )
                kb.add_data_property(name, domain)
            elif keyword == "disjoint":
                if len(tokens) != 3:
                    raise KbParseError("disjoint takes two classes", line=line_no)
                kb.add_disjoint(_check_ident(tokens[1], line_no), _check_ident(tokens[2], line_no))
            elif keyword == "individual":
                rest = line[len("individual") :].strip()
                if ":" in rest:
                    name_part, classes_part = rest.split(":", 1)
                    classes = [
                        _check_ident(c.strip(), line_no)
                        for c in classes_part.split(",")
                        if c.strip()
                    ]
                    if not classes:
                        raise KbParseError("empty class list", line=line_no)
                else:
                    name_part, classes = rest, []
                name = _check_ident(name_part.strip(), line_no)
                kb.add_individual(name, classes=classes)
            elif keyword == "assert":
                if len(tokens) != 4:
                    raise KbParseError("assert takes subject, property, object", line=line_no)
                kb.assert_object(
                    _check_ident(tokens[2], line_no),
                    _check_ident(tokens[1], line_no),
                    _check_ident(tokens[3], line_no),
                )
            elif keyword == "data":
                if len(tokens) != 4:
                    raise KbParseError("data takes subject, property, value", line=line_no)
                try:
                    value = float(tokens[3])
                except ValueError:
                    raise KbParseError(
                        f"invalid float {tokens[3]!r}", line=line_no, token=tokens[3]
                    ) from None
                kb.assert_data(_check_ident(tokens[2], line_no), _check_ident(tokens[1], line_no), value)
            elif keyword == "rule":
                rest = line[len("rule") :].strip()
                if ":" not in rest:
                    raise KbParseError("rule needs 'name:' prefix", line=line_no)
                name_part, clause = rest.split(":", 1)
                name = _check_ident(name_part.strip(), line_no)
                if "->" not in clause:
                    raise KbParseError("rule needs '->'", line=line_no)
                body_text, head_text = clause.split("->", 1)
                body = tuple(
                    _parse_atom(part, kb, line_no) for part in body_text.split("^") if part.strip()
                )
                if not body:
                    raise KbParseError("rule body is empty", line=line_no)
                head = _parse_atom(head_text, kb, line_no)
                kb.add_rule(Rule(name=name, body=body, head=head))
            else:
                raise KbParseError(
                    f"unknown statement {keyword!r}", line=line_no, token=keyword
                )
        except KbParseError:
            raise
        except Exception as exc:
            raise KbParseError(str(exc), line=line_no) from exc
    kb.check_integrity()
    return kb


def serialize_kb(kb: KnowledgeBase) -> str:
    """Render a knowledge base in canonical form (stable statement order,
    repr floats); equal knowledge bases produce identical text."""
    kb.check_integrity()
    lines = [HEADER_COMMENT]
    for name in sorted(kb.classes):
        lines.append(f"class {name}")
    for name in sorted(kb.classes):
        for parent in sorted(kb.classes[name].parents):
            lines.append(f"subclass {name} {parent}")
    for name in sorted(kb.classes):
        for key, value in kb.classes[name].annotations:
            lines.append(f"annotation {name} {key} {value}")
    for name in sorted(kb.object_properties):
        prop = kb.object_properties[name]
        parts = [f"objprop {name}", f"domain={prop.domain}", f"range={prop.range}"]
        parts.extend(c for c in CHARACTERISTICS if prop.has(c))
        if prop.inverse is not None:
            parts.append(f"inverse={prop.inverse}")
        if prop.expands_to is not None:
            parts.append(f"expands_to={prop.expands_to}")
        lines.append(" ".join(parts))
    for name in sorted(kb.data_properties):
        prop = kb.data_properties[name]
        lines.append(f"dataprop {name} domain={prop.domain} type=float")
    for a, b in sorted(kb.disjoint):
        lines.append(f"disjoint {a} {b}")
    memberships: dict[str, set[str]] = {name: set(ind.classes) for name, ind in kb.individuals.items()}
    for assertion in kb.assertions:
        if isinstance(assertion, ClassAssertion):
            memberships[assertion.individual].add(assertion.cls)
    for name in sorted(kb.individuals):
        classes = memberships[name]
        if classes:
            lines.append(f"individual {name} : {','.join(sorted(classes))}")
        else:
            lines.append(f"individual {name}")
    for assertion in sorted(kb.object_assertions(), key=lambda a: a.sort_key()):
        lines.append(f"assert {assertion.subject} {assertion.prop} {assertion.obj}")
    for assertion in sorted(kb.data_assertions(), key=lambda a: a.sort_key()):
        lines.append(f"data {assertion.subject} {assertion.prop} {assertion.value!r}")
    for name in sorted(kb.rules):
        lines.append(str(kb.rules[name]))
    return "\n".join(lines) + "\n"

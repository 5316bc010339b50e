"""Shared serialization of options, antecedents and syntax trees.

The CLI's machine-readable output and the HTTP service emit exactly these
shapes, so clients can treat them as one format.
"""

from __future__ import annotations

from .core import Category, CategoryKind, FeatureStructure, Variable
from .parser import (
    Antecedent,
    BwdRefLeaf,
    FwdRefLeaf,
    ScopeOpenerLeaf,
    SyntaxTree,
    TokenLeaf,
    TokenOption,
)


def features_to_wire(fs: FeatureStructure) -> dict[str, str]:
    """Features as a JSON object; unbound variables render as $A, $B, ...
    in first-occurrence order within one structure."""
    names: dict[int, str] = {}
    out: dict[str, str] = {}
    for name, value in fs:
        if isinstance(value, Variable):
            if value.id not in names:
                n = len(names)
                names[value.id] = "$" + (chr(ord("A") + n) if n < 26 else f"V{n}")
            out[name] = names[value.id]
        else:
            out[name] = value.text
    return out


def option_to_wire(opt: TokenOption) -> dict:
    """Option object: {token, category, features}. `category` is the
    preterminal name, or the empty string for a literal token."""
    name = opt.category.name if opt.category.kind is CategoryKind.PRETERMINAL else ""
    return {"token": opt.token, "category": name or "", "features": features_to_wire(opt.features)}


def antecedent_to_wire(ant: Antecedent) -> dict:
    return {"position": ant.position, "features": features_to_wire(ant.features)}


def category_to_wire(cat: Category) -> dict:
    out: dict = {"kind": cat.kind.value}
    if cat.name is not None:
        out["name"] = cat.name
    if cat.token is not None:
        out["token"] = cat.token
    if cat.features:
        out["features"] = features_to_wire(cat.features)
    return out


def tree_to_wire(tree: SyntaxTree) -> dict:
    children = []
    for child in tree.children:
        if isinstance(child, TokenLeaf):
            children.append({"kind": "token", "token": child.token})
        elif isinstance(child, FwdRefLeaf):
            children.append({
                "kind": "fwd_ref",
                "position": child.antecedent.position,
                "features": features_to_wire(child.antecedent.features),
            })
        elif isinstance(child, BwdRefLeaf):
            children.append({
                "kind": "bwd_ref",
                "features": features_to_wire(child.features),
                "antecedent_position": child.antecedent.position,
            })
        elif isinstance(child, ScopeOpenerLeaf):
            children.append({"kind": "scope_opener", "position": child.position})
        else:
            children.append(tree_to_wire(child))
    return {
        "kind": "node",
        "category": category_to_wire(tree.category),
        "scope_spans": [list(span) for span in tree.scope_spans],
        "children": children,
    }


def _category_text(cat: Category) -> str:
    feats = ""
    if cat.features:
        wire = features_to_wire(cat.features)
        feats = "(" + ", ".join(f"{n}:{v}" for n, v in wire.items()) + ")"
    return f"{cat.name}{feats}"


def render_tree_text(tree: SyntaxTree, indent: int = 0) -> str:
    """Human-readable indented tree; scope closings and reference targets
    annotated inline."""
    pad = "  " * indent
    spans = "".join(f" [closes {a}..{b})" for a, b in tree.scope_spans)
    mark = " ~" if tree.scope_spans else ""
    lines = [f"{pad}{_category_text(tree.category)}{mark}{spans}"]
    for child in tree.children:
        cpad = "  " * (indent + 1)
        if isinstance(child, TokenLeaf):
            lines.append(f"{cpad}{child.token!r}")
        elif isinstance(child, FwdRefLeaf):
            wire = features_to_wire(child.antecedent.features)
            feats = ", ".join(f"{n}:{v}" for n, v in wire.items())
            lines.append(f"{cpad}>({feats}) @{child.antecedent.position}")
        elif isinstance(child, BwdRefLeaf):
            wire = features_to_wire(child.features)
            feats = ", ".join(f"{n}:{v}" for n, v in wire.items())
            lines.append(f"{cpad}<({feats}) -> @{child.antecedent.position}")
        elif isinstance(child, ScopeOpenerLeaf):
            lines.append(f"{cpad}// @{child.position}")
        else:
            lines.append(render_tree_text(child, indent + 1))
    return "\n".join(lines)

"""Forward-chaining rule engine over group dossiers.

Every structural fact about a group is an input; an absent fact is unknown
and never defaulted.  Each rule fires only on facts explicitly present, so
adding facts can only add firings.  The engine runs the fixed catalog R1..R13
in order and records every firing as a trace step carrying its citation.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Optional

from rimcheck.blockdata import BlockRecord, Exactness, is_prime
from rimcheck.kawata import (
    PatternKind,
    classify_pattern,
    detect_patterns,
    exclude_by_lower_bounds,
)


class Status(str, enum.Enum):
    ALL_AT_END = "AllAtEnd"
    NOT_ALL_AT_END = "NotAllAtEnd"
    UNKNOWN = "Unknown"


class DossierError(ValueError):
    """Malformed dossier, or a dossier that contradicts its linked data."""


class NotInFamily(ValueError):
    pass


class ParameterError(ValueError):
    pass


class ReplayError(AssertionError):
    pass


# --- dossier model -------------------------------------------------------

FAMILIES = ("A7", "A8", "M11", "M22", "M23", "HS", "ON", "PSL3", "PSU3", "PSp4_qminus",
            "PSp4_qplus", "PSL4", "PSU4", "PSL5", "PSU5", "PSL2_3n", "Other")

PREDICATES = ("p_solvable", "has_nontrivial_normal_p_subgroup", "perfect_lie_type_defining_char",
              "full_defect", "symmetric_alternating_or_cover", "defect_divisible_by_p_cubed",
              "o_p_prime_trivial", "has_periodic_simple")

EQUIVALENCE_KINDS = ("morita", "puig", "isomorphic")


@dataclass(frozen=True)
class SimpleFactorRef:
    family: str
    params: Optional[dict] = None
    verdict_ref: Optional[str] = None   # BlockRecord id of B_0(H_i)
    dossier_ref: Optional[str] = None   # dossier name for H_i


@dataclass(frozen=True)
class OPPrimeDecomposition:
    q_part_nontrivial: bool
    simple_factors: tuple[SimpleFactorRef, ...] = ()


@dataclass(frozen=True)
class ChainEntry:
    subgroup_name: str
    quotient_solvable_p_prime: bool
    same_block_idempotent: bool


@dataclass(frozen=True)
class Equivalence:
    target: str
    kind: str
    citation: str


@dataclass(frozen=True)
class GroupDossier:
    name: str
    prime: int
    sylow: dict = field(default_factory=dict)
    predicates: dict = field(default_factory=dict)
    o_pprime_decomposition: Optional[OPPrimeDecomposition] = None
    normal_chain: tuple[ChainEntry, ...] = ()
    block_refs: tuple[str, ...] = ()
    wild: Optional[bool] = None
    equivalences: tuple[Equivalence, ...] = ()
    mod_o_p_prime: Optional[str] = None
    notes: Optional[str] = None

    def __post_init__(self):
        if not is_prime(self.prime):
            raise DossierError(f"prime: {self.prime} is not a prime")
        if self.o_pprime_decomposition is not None and self.predicates.get("o_p_prime_trivial") is not True:
            raise DossierError("o_pprime_decomposition requires predicates.o_p_prime_trivial = true")

    def fact(self, path: str):
        """Look up a dotted path such as ``sylow.abelian``; None when absent."""
        head, _, rest = path.partition(".")
        if head == "sylow":
            return self.sylow.get(rest)
        if head == "predicates":
            return self.predicates.get(rest)
        if head == "o_pprime_decomposition":
            d = self.o_pprime_decomposition
            if d is None:
                return None
            if rest == "q_part_nontrivial":
                return d.q_part_nontrivial
            if rest == "m":
                return len(d.simple_factors)
        if head in ("prime", "wild", "name"):
            return getattr(self, head)
        raise KeyError(path)


def _opt(obj: dict, key: str, kind, where: str):
    if key not in obj or obj[key] is None:
        return None
    v = obj[key]
    ok = (type(v) is int) if kind is int else isinstance(v, kind)
    if not ok:
        raise DossierError(f"{where}{key}: expected {kind.__name__}, got {type(v).__name__}")
    return v


def _req(obj: dict, key: str, kind, where: str):
    if key not in obj:
        raise DossierError(f"{where}{key}: missing field")
    v = _opt(obj, key, kind, where)
    if v is None:
        raise DossierError(f"{where}{key}: must not be null")
    return v


def _no_extra(obj: dict, allowed, where: str):
    extra = sorted(set(obj) - set(allowed))
    if extra:
        raise DossierError(f"{where}{extra[0]}: unknown field")


def dossier_from_dict(obj: Any) -> GroupDossier:
    if not isinstance(obj, dict):
        raise DossierError("<root>: expected a JSON object")
    _no_extra(obj, ("name", "prime", "sylow", "predicates", "o_pprime_decomposition", "normal_chain",
                    "block_refs", "wild", "equivalences", "mod_o_p_prime", "notes"), "")
    sylow = _opt(obj, "sylow", dict, "") or {}
    _no_extra(sylow, ("abelian", "cyclic", "p_rank"), "sylow.")
    sylow_out = {}
    for k, kind in (("abelian", bool), ("cyclic", bool), ("p_rank", int)):
        v = _opt(sylow, k, kind, "sylow.")
        if v is not None:
            sylow_out[k] = v
    preds = _opt(obj, "predicates", dict, "") or {}
    _no_extra(preds, PREDICATES, "predicates.")
    preds_out = {k: v for k in PREDICATES if (v := _opt(preds, k, bool, "predicates.")) is not None}

    dec = None
    raw = _opt(obj, "o_pprime_decomposition", dict, "")
    if raw is not None:
        w = "o_pprime_decomposition."
        _no_extra(raw, ("q_part_nontrivial", "simple_factors"), w)
        factors = []
        for i, f in enumerate(_opt(raw, "simple_factors", list, w) or []):
            fw = f"{w}simple_factors[{i}]."
            if not isinstance(f, dict):
                raise DossierError(f"{fw[:-1]}: expected object")
            _no_extra(f, ("family", "params", "verdict_ref", "dossier_ref"), fw)
            fam = _req(f, "family", str, fw)
            if fam not in FAMILIES:
                raise DossierError(f"{fw}family: unknown family {fam!r}")
            params = _opt(f, "params", dict, fw)
            factors.append(SimpleFactorRef(fam, params, _opt(f, "verdict_ref", str, fw),
                                           _opt(f, "dossier_ref", str, fw)))
        dec = OPPrimeDecomposition(_req(raw, "q_part_nontrivial", bool, w), tuple(factors))

    chain = []
    for i, c in enumerate(_opt(obj, "normal_chain", list, "") or []):
        cw = f"normal_chain[{i}]."
        if not isinstance(c, dict):
            raise DossierError(f"{cw[:-1]}: expected object")
        _no_extra(c, ("subgroup_name", "quotient_solvable_p_prime", "same_block_idempotent"), cw)
        chain.append(ChainEntry(_req(c, "subgroup_name", str, cw),
                                _req(c, "quotient_solvable_p_prime", bool, cw),
                                _req(c, "same_block_idempotent", bool, cw)))

    refs = _opt(obj, "block_refs", list, "") or []
    if not all(isinstance(r, str) for r in refs):
        raise DossierError("block_refs: expected a list of strings")

    eqs = []
    for i, e in enumerate(_opt(obj, "equivalences", list, "") or []):
        ew = f"equivalences[{i}]."
        if not isinstance(e, dict):
            raise DossierError(f"{ew[:-1]}: expected object")
        _no_extra(e, ("target", "kind", "citation"), ew)
        kind = _req(e, "kind", str, ew)
        if kind not in EQUIVALENCE_KINDS:
            raise DossierError(f"{ew}kind: expected one of {EQUIVALENCE_KINDS}, got {kind!r}")
        eqs.append(Equivalence(_req(e, "target", str, ew), kind, _req(e, "citation", str, ew)))

    return GroupDossier(
        name=_req(obj, "name", str, ""),
        prime=_req(obj, "prime", int, ""),
        sylow=sylow_out,
        predicates=preds_out,
        o_pprime_decomposition=dec,
        normal_chain=tuple(chain),
        block_refs=tuple(refs),
        wild=_opt(obj, "wild", bool, ""),
        equivalences=tuple(eqs),
        mod_o_p_prime=_opt(obj, "mod_o_p_prime", str, ""),
        notes=_opt(obj, "notes", str, ""),
    )


def load_dossier(data) -> GroupDossier:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as e:
        raise DossierError(f"<root>: invalid JSON: {e}") from None
    return dossier_from_dict(obj)


def dossier_to_dict(d: GroupDossier) -> dict:
    out: dict = {"name": d.name, "prime": d.prime}
    if d.sylow:
        out["sylow"] = dict(d.sylow)
    if d.predicates:
        out["predicates"] = dict(d.predicates)
    if d.o_pprime_decomposition is not None:
        fs = []
        for f in d.o_pprime_decomposition.simple_factors:
            fd = {"family": f.family}
            for k in ("params", "verdict_ref", "dossier_ref"):
                if getattr(f, k) is not None:
                    fd[k] = getattr(f, k)
            fs.append(fd)
        out["o_pprime_decomposition"] = {"q_part_nontrivial": d.o_pprime_decomposition.q_part_nontrivial,
                                         "simple_factors": fs}
    if d.normal_chain:
        out["normal_chain"] = [vars(c).copy() for c in d.normal_chain]
    if d.block_refs:
        out["block_refs"] = list(d.block_refs)
    if d.wild is not None:
        out["wild"] = d.wild
    if d.equivalences:
        out["equivalences"] = [vars(e).copy() for e in d.equivalences]
    if d.mod_o_p_prime is not None:
        out["mod_o_p_prime"] = d.mod_o_p_prime
    if d.notes is not None:
        out["notes"] = d.notes
    return out


# --- simple group families at p = 3 ---------------------------------------

def prime_power_base(q: int) -> Optional[int]:
    """Return r if q = r^k for a prime r and k >= 1, else None."""
    if q < 2:
        return None
    r = 2
    while r * r <= q:
        if q % r == 0:
            while q % r == 0:
                q //= r
            return r if q == 1 else None
        r += 1
    return q


def _exactly3(x: int) -> bool:
    return x % 3 == 0 and x % 9 != 0


# family -> (case, parameter, [(condition text, predicate)])
_FAMILY_RULES: dict[str, tuple[str, Optional[str], list[tuple[str, Callable[[int], bool]]]]] = {
    "A7": ("(i)", None, []),
    "A8": ("(i)", None, []),
    "M11": ("(i)", None, []),
    "M22": ("(i)", None, []),
    "M23": ("(i)", None, []),
    "HS": ("(i)", None, []),
    "ON": ("(i)", None, []),
    "PSL3": ("(ii)", "q", [("3||(q-1)", lambda q: _exactly3(q - 1))]),
    "PSU3": ("(iii)", "q", [("3||(q+1)", lambda q: _exactly3(q + 1))]),
    "PSp4_qminus": ("(iv)", "q", [("3|(q-1)", lambda q: (q - 1) % 3 == 0)]),
    "PSp4_qplus": ("(v)", "q", [("q>2", lambda q: q > 2), ("3|(q+1)", lambda q: (q + 1) % 3 == 0)]),
    "PSL4": ("(vi)", "q", [("q>2", lambda q: q > 2), ("3|(q+1)", lambda q: (q + 1) % 3 == 0)]),
    "PSU4": ("(vii)", "q", [("3|(q-1)", lambda q: (q - 1) % 3 == 0)]),
    "PSL5": ("(viii)", "q", [("3|(q+1)", lambda q: (q + 1) % 3 == 0)]),
    "PSU5": ("(ix)", "q", [("3|(q-1)", lambda q: (q - 1) % 3 == 0)]),
    "PSL2_3n": ("(x)", "n", [("n>=2", lambda n: n >= 2)]),
}

FAMILY_LIST_CITATION = ("Fong's list, as restated in 2010 (Prop. 4.3): non-abelian simple groups "
                        "with non-cyclic abelian Sylow 3-subgroups")


@dataclass(frozen=True)
class FamilyMatch:
    family: str
    case: str
    conditions: tuple[str, ...]
    params: dict

    def to_dict(self) -> dict:
        return {"family": self.family, "case": self.case, "conditions": list(self.conditions),
                "params": self.params, "citation": FAMILY_LIST_CITATION}


def classify_simple_group(ref: SimpleFactorRef) -> FamilyMatch:
    """Check a simple factor against the p = 3 family list.

    Parameter problems (missing parameter, q not a prime power) raise
    ParameterError before any family condition is looked at.
    """
    if ref.family not in _FAMILY_RULES:
        raise NotInFamily(f"{ref.family}: not one of the listed families")
    case, pname, conds = _FAMILY_RULES[ref.family]
    params = dict(ref.params or {})
    if pname is None:
        return FamilyMatch(ref.family, case, (), params)
    if pname not in params:
        raise ParameterError(f"{ref.family} requires parameter {pname!r}")
    v = params[pname]
    if type(v) is not int:
        raise ParameterError(f"{pname} must be an integer, got {v!r}")
    if pname == "q" and prime_power_base(v) is None:
        raise ParameterError(f"q={v} is not a prime power")
    for text, pred in conds:
        if not pred(v):
            raise NotInFamily(f"{ref.family} with {pname}={v} fails {text}")
    return FamilyMatch(ref.family, case, tuple(t for t, _ in conds), params)


# --- verdicts ------------------------------------------------------------

@dataclass(frozen=True)
class Step:
    rule_id: str
    citation: str
    inputs: dict
    conclusion: Status
    support: tuple = ()        # nested Verdicts this step relies on

    def to_dict(self) -> dict:
        d = {"rule_id": self.rule_id, "citation": self.citation,
             "inputs": self.inputs, "conclusion": self.conclusion.value}
        if self.support:
            d["support"] = [v.to_dict() for v in self.support]
        return d


@dataclass(frozen=True)
class Verdict:
    subject: str
    status: Status
    trace: tuple[Step, ...] = ()
    advisories: tuple[str, ...] = ()

    def __post_init__(self):
        if self.status is not Status.UNKNOWN and not self.trace:
            raise ValueError("a definite verdict needs a nonempty trace")

    def to_dict(self) -> dict:
        return {"subject": self.subject, "status": self.status.value,
                "trace": [s.to_dict() for s in self.trace],
                "advisories": list(self.advisories)}

    def describe(self, indent: str = "") -> str:
        lines = [f"{indent}{self.subject}: {self.status.value}"]
        for s in self.trace:
            lines.append(f"{indent}  [{s.rule_id}] {s.conclusion.value} -- {s.citation}")
            for k, v in s.inputs.items():
                lines.append(f"{indent}      {k} = {json.dumps(v)}")
            for sub in s.support:
                lines.append(sub.describe(indent + "      "))
        for a in self.advisories:
            lines.append(f"{indent}  note: {a}")
        return "\n".join(lines)


class ConflictingDerivations(Exception):
    def __init__(self, subject: str, positive: list, negative: list):
        self.subject = subject
        self.positive = positive
        self.negative = negative
        super().__init__(
            f"{subject}: both AllAtEnd ({', '.join(s.rule_id for s in positive)}) and "
            f"NotAllAtEnd ({', '.join(s.rule_id for s in negative)}) are derivable")

    def to_dict(self) -> dict:
        return {"subject": self.subject, "error": "ConflictingDerivations",
                "all_at_end": [s.to_dict() for s in self.positive],
                "not_all_at_end": [s.to_dict() for s in self.negative]}


@dataclass
class _Ctx:
    blocks: Mapping[str, BlockRecord]
    dossiers: Mapping[str, GroupDossier]
    principal: bool
    stack: tuple = ()

    def sub(self, name: str) -> Optional[Verdict]:
        """Verdict for a referenced dossier, or None if absent or cyclic."""
        if name in self.stack or name not in self.dossiers:
            return None
        return _evaluate(self.dossiers[name], _Ctx(self.blocks, self.dossiers, self.principal,
                                                   self.stack + (name,)))


def block_facts(block_id: str, rec: BlockRecord) -> dict:
    """Cartan-matrix evidence for one block, as recorded in trace inputs."""
    facts = {"block.id": block_id, "block.tag": rec.block_tag, "block.wild": rec.wild,
             "block.exactness": rec.cartan.exactness.value}
    if rec.cartan.exactness is Exactness.EXACT:
        pats = detect_patterns(rec.cartan)
        facts["block.patterns"] = [dict(p.to_dict(), kind=classify_pattern(p).value) for p in pats]
    else:
        facts["block.excluded"] = exclude_by_lower_bounds(rec.cartan).excluded
    return facts


def block_status(facts: dict) -> Optional[Status]:
    """What the Cartan evidence alone says about a wild block."""
    if facts["block.wild"] is not True:
        return None
    if facts["block.exactness"] == Exactness.EXACT.value:
        pats = facts["block.patterns"]
        if any(p["kind"] == PatternKind.CONFIRMED_OFF_RIM.value for p in pats):
            return Status.NOT_ALL_AT_END
        return Status.ALL_AT_END if not pats else None
    return Status.ALL_AT_END if facts["block.excluded"] else None


def _factor_verdict(f: SimpleFactorRef, ctx: _Ctx):
    """Verdict for B_0(H_1): from its dossier or, failing that, its block."""
    if f.dossier_ref is not None:
        v = ctx.sub(f.dossier_ref)
        if v is not None:
            return v.status, (v,)
    if f.verdict_ref is not None and f.verdict_ref in ctx.blocks:
        rec = ctx.blocks[f.verdict_ref]
        if rec.block_tag == "principal":
            facts = block_facts(f.verdict_ref, rec)
            st = block_status(facts)
            if st is not None:
                step = Step("R10" if st is Status.NOT_ALL_AT_END else "R9",
                            RULES_BY_ID["R10" if st is Status.NOT_ALL_AT_END else "R9"].citation,
                            facts, st)
                return st, (Verdict(f"block {f.verdict_ref}", st, (step,)),)
    return None, ()


# Each gather function yields (inputs, support) candidates; the rule's
# condition maps inputs to a conclusion or None.

def _g_facts(*paths):
    def gather(d: GroupDossier, ctx: _Ctx):
        yield {p: d.fact(p) for p in paths}, ()
    return gather


def _g_scoped(*paths):
    def gather(d: GroupDossier, ctx: _Ctx):
        inputs = {p: d.fact(p) for p in paths}
        inputs["principal_scope"] = ctx.principal
        yield inputs, ()
    return gather


def _g_chain(d: GroupDossier, ctx: _Ctx):
    for c in d.normal_chain:
        sub = ctx.sub(c.subgroup_name)
        inputs = {"subgroup_name": c.subgroup_name,
                  "quotient_solvable_p_prime": c.quotient_solvable_p_prime,
                  "same_block_idempotent": c.same_block_idempotent,
                  f"subverdict.{c.subgroup_name}": sub.status.value if sub else None}
        yield inputs, (sub,) if sub else ()


def _g_reduction(d: GroupDossier, ctx: _Ctx):
    paths = ("prime", "sylow.abelian", "sylow.cyclic", "predicates.o_p_prime_trivial",
             "o_pprime_decomposition.q_part_nontrivial", "o_pprime_decomposition.m")
    inputs = {p: d.fact(p) for p in paths}
    inputs["principal_scope"] = ctx.principal
    support = ()
    dec = d.o_pprime_decomposition
    if dec is not None and len(dec.simple_factors) == 1 and dec.q_part_nontrivial is False:
        st, support = _factor_verdict(dec.simple_factors[0], ctx)
        inputs["factor_status"] = st.value if st else None
    yield inputs, support


def _g_blocks(d: GroupDossier, ctx: _Ctx):
    for ref in d.block_refs:
        rec = ctx.blocks.get(ref)
        if rec is None:
            continue
        if rec.prime != d.prime:
            raise DossierError(f"{d.name}: block {ref} is at p={rec.prime}, dossier at p={d.prime}")
        facts = block_facts(ref, rec)
        facts["principal_scope"] = ctx.principal
        yield facts, ()


def _g_equiv(d: GroupDossier, ctx: _Ctx):
    for e in d.equivalences:
        sub = ctx.sub(e.target)
        yield ({"equivalence.target": e.target, "equivalence.kind": e.kind,
                "equivalence.citation": e.citation,
                f"subverdict.{e.target}": sub.status.value if sub else None},
               (sub,) if sub else ())


def _g_quotient(d: GroupDossier, ctx: _Ctx):
    if d.mod_o_p_prime is None:
        return
    sub = ctx.sub(d.mod_o_p_prime)
    yield ({"mod_o_p_prime": d.mod_o_p_prime, "principal_scope": ctx.principal,
            f"subverdict.{d.mod_o_p_prime}": sub.status.value if sub else None},
           (sub,) if sub else ())


def _g_periodic(d: GroupDossier, ctx: _Ctx):
    dec = d.o_pprime_decomposition
    inputs = {"wild": d.wild, "predicates.has_periodic_simple": d.fact("predicates.has_periodic_simple"),
              "principal_scope": ctx.principal,
              "p_divisible_factors": None if dec is None else len(dec.simple_factors) + int(dec.q_part_nontrivial)}
    yield inputs, ()


def _sub_status(inputs: dict) -> Optional[Status]:
    for k, v in inputs.items():
        if k.startswith("subverdict."):
            return Status(v) if v is not None else None
    return None


_AE = Status.ALL_AT_END


def _c_r7(i: dict):
    if not (i["principal_scope"] and i["prime"] != 2 and i["sylow.abelian"] is True
            and i["sylow.cyclic"] is False and i["predicates.o_p_prime_trivial"] is True):
        return None
    q, m = i["o_pprime_decomposition.q_part_nontrivial"], i["o_pprime_decomposition.m"]
    if q is True:
        return _AE                                      # (i)
    if q is False and m is not None and m >= 2:
        return _AE                                      # (ii)
    if q is False and m == 1 and i.get("factor_status") == _AE.value:
        return _AE                                      # (iii)
    return None


def reduction_case(i: dict) -> Optional[str]:
    """Which of the mutually exclusive R7 conditions the inputs meet."""
    q, m = i.get("o_pprime_decomposition.q_part_nontrivial"), i.get("o_pprime_decomposition.m")
    if q is True:
        return "(i)"
    if q is False and m is not None and m >= 2:
        return "(ii)"
    if q is False and m == 1:
        return "(iii)"
    return None


def _c_block_pos(i: dict):
    if i["block.tag"] != "principal" and i["principal_scope"]:
        return None
    return _AE if block_status(i) is _AE else None


def _c_block_neg(i: dict):
    if i["block.tag"] != "principal" and i["principal_scope"]:
        return None
    st = block_status(i)
    return st if st is Status.NOT_ALL_AT_END else None


@dataclass(frozen=True)
class Rule:
    rule_id: str
    citation: str
    gather: Callable
    condition: Callable[[dict], Optional[Status]]
    advisory: bool = False


RULES = (
    Rule("R1", "Kawata 1997, Thm 2.1: a non-trivial normal p-subgroup puts every simple module "
               "of a wild block at the end of its component",
         _g_facts("predicates.has_nontrivial_normal_p_subgroup"),
         lambda i: _AE if i["predicates.has_nontrivial_normal_p_subgroup"] is True else None),
    Rule("R2", "Kawata 1997, Cor 2.2: G is p-solvable",
         _g_facts("predicates.p_solvable"),
         lambda i: _AE if i["predicates.p_solvable"] is True else None),
    Rule("R3", "Kawata-Michler-Uno 2001, Theorem: perfect group of Lie type in defining "
               "characteristic, block of full defect",
         _g_facts("predicates.perfect_lie_type_defining_char", "predicates.full_defect"),
         lambda i: _AE if (i["predicates.perfect_lie_type_defining_char"] is True
                           and i["predicates.full_defect"] is True) else None),
    Rule("R4", "Kawata-Michler-Uno 2000, Thm 5: principal 2-block with abelian Sylow 2-subgroup",
         _g_scoped("prime", "sylow.abelian"),
         lambda i: _AE if (i["principal_scope"] and i["prime"] == 2 and i["sylow.abelian"] is True) else None),
    Rule("R5", "Bessenrodt-Uno 2001, sec. 5: symmetric or alternating group or a Schur cover, "
               "block defect divisible by p^3",
         _g_facts("predicates.symmetric_alternating_or_cover", "predicates.defect_divisible_by_p_cubed"),
         lambda i: _AE if (i["predicates.symmetric_alternating_or_cover"] is True
                           and i["predicates.defect_divisible_by_p_cubed"] is True) else None),
    Rule("R6", "solvable p'-quotient lift: N normal in G, G/N solvable of p'-order, 1_B = 1_b; "
               "simple b-modules at the end force simple B-modules to the end (by induction on "
               "prime-index steps, Clifford theory)",
         _g_chain,
         lambda i: _AE if (i["quotient_solvable_p_prime"] is True and i["same_block_idempotent"] is True
                           and _sub_status(i) is _AE) else None),
    Rule("R7", "reduction to O^{p'}: p odd, non-cyclic abelian Sylow p-subgroup, O_{p'}(G) = 1, "
               "O^{p'}(G) = Q x H_1 x ... x H_m (Fong-Harris 5A-5C) with (i) Q != 1, "
               "(ii) Q = 1 and m >= 2, or (iii) Q = 1, m = 1 and B_0(H_1) has all simples at the end",
         _g_reduction, _c_r7),
    Rule("R8", "p = 3: abelian Sylow 3-subgroups and wild principal block (reduction to simple "
               "groups plus the family check)",
         _g_scoped("prime", "sylow.abelian", "wild"),
         lambda i: _AE if (i["principal_scope"] and i["prime"] == 3 and i["sylow.abelian"] is True
                           and i["wild"] is True) else None),
    Rule("R9", "Kawata 1997, Thm 1.5 (contrapositive): a simple module off the end forces the "
               "uniserial Cartan pattern; the Cartan data admits none",
         _g_blocks, _c_block_pos),
    Rule("R10", "Kawata 1997, Thm 1.5 shape with n = 2: P(S_2) = [S_2, S, S_2] and the standard "
                "sequence puts S on the 2nd row of its component",
         _g_blocks, _c_block_neg),
    Rule("R11", "Morita (or Puig) equivalent blocks have the same position of simple modules in "
                "their stable AR components",
         _g_equiv, _sub_status),
    Rule("R12", "B_0(kG) and B_0(k[G/O_{p'}(G)]) are Morita equivalent",
         _g_quotient,
         lambda i: _sub_status(i) if i["principal_scope"] else None),
    Rule("R13", "Kawata-Michler-Uno 2000, Lemma 5.2 (generalised): a wild principal block of a "
                "direct product of >= 2 factors of order divisible by p has no periodic simple module",
         _g_periodic,
         lambda i: None, advisory=True),
)

RULES_BY_ID = {r.rule_id: r for r in RULES}


def _r13_flag(i: dict) -> bool:
    return (i["wild"] is True and i["principal_scope"] and i["predicates.has_periodic_simple"] is True
            and i["p_divisible_factors"] is not None and i["p_divisible_factors"] >= 2)


def _evaluate(d: GroupDossier, ctx: _Ctx) -> Verdict:
    steps: list[Step] = []
    notes: list[str] = []
    for rule in RULES:
        for inputs, support in rule.gather(d, ctx):
            if rule.rule_id == "R13":
                if _r13_flag(inputs):
                    notes.append(f"R13: {d.name} claims a periodic simple module in a wild principal "
                                 f"block of a product with {inputs['p_divisible_factors']} factors "
                                 f"of order divisible by p; inconsistent ({rule.citation})")
                continue
            if rule.rule_id == "R10" and "block.patterns" in inputs and inputs["block.wild"] is True:
                n3 = [p for p in inputs["block.patterns"] if p["kind"] == PatternKind.CANDIDATE_ONLY.value]
                if n3:
                    notes.append(f"block {inputs['block.id']}: {len(n3)} pattern(s) with n >= 3 are "
                                 "necessary-condition candidates only, no verdict drawn")
            if rule.rule_id == "R10" and inputs.get("block.wild") is not True:
                notes.append(f"block {inputs['block.id']}: not asserted wild; Cartan criteria not applied")
            concl = rule.condition(inputs)
            if concl is None or concl is Status.UNKNOWN:
                continue
            if rule.rule_id == "R7":
                inputs = dict(inputs, condition=reduction_case(inputs))
            steps.append(Step(rule.rule_id, rule.citation, inputs, concl, tuple(support)))

    if d.o_pprime_decomposition is not None and d.prime == 3:
        for f in d.o_pprime_decomposition.simple_factors:
            try:
                classify_simple_group(f)
            except (NotInFamily, ParameterError) as e:
                notes.append(f"simple factor {f.family}: {e}")

    pos = [s for s in steps if s.conclusion is Status.ALL_AT_END]
    neg = [s for s in steps if s.conclusion is Status.NOT_ALL_AT_END]
    if pos and neg:
        raise ConflictingDerivations(d.name, pos, neg)
    status = Status.ALL_AT_END if pos else Status.NOT_ALL_AT_END if neg else Status.UNKNOWN
    return Verdict(d.name, status, tuple(steps), tuple(dict.fromkeys(notes)))


def apply_rules(dossier: GroupDossier,
                blocks: Optional[Mapping[str, BlockRecord]] = None,
                dossiers: Optional[Mapping[str, GroupDossier]] = None,
                principal: bool = True) -> Verdict:
    """Run the rule catalog on a dossier.

    ``blocks`` maps block ids to records (for block_refs and simple factor
    verdict_refs); ``dossiers`` maps names to the dossiers of related groups
    (normal subgroups, equivalent blocks' groups, G/O_{p'}(G), simple
    factors).  ``principal=False`` switches off the rules stated only for
    principal blocks.
    """
    ctx = _Ctx(blocks or {}, dossiers or {}, principal, (dossier.name,))
    return _evaluate(dossier, ctx)


# --- audit replay --------------------------------------------------------

def replay(verdict: Verdict, dossier: GroupDossier,
           blocks: Optional[Mapping[str, BlockRecord]] = None,
           dossiers: Optional[Mapping[str, GroupDossier]] = None,
           principal: bool = True) -> None:
    """Re-derive a verdict from its trace alone, checking every recorded input
    against the dossier and linked data.  Raises ReplayError on any mismatch."""
    blocks = blocks or {}
    dossiers = dossiers or {}
    for step in verdict.trace:
        rule = RULES_BY_ID.get(step.rule_id)
        if rule is None or rule.advisory:
            raise ReplayError(f"unknown or advisory rule {step.rule_id}")
        if step.citation != rule.citation:
            raise ReplayError(f"{step.rule_id}: citation mismatch")
        inputs = dict(step.inputs)
        inputs.pop("condition", None)
        by_name = {v.subject: v for v in step.support}
        for key, val in inputs.items():
            if key == "principal_scope":
                if val != principal:
                    raise ReplayError(f"{step.rule_id}: scope mismatch")
            elif key.startswith("subverdict."):
                name = key[len("subverdict."):]
                sub = by_name.get(name)
                if sub is None or sub.status.value != val or name not in dossiers:
                    raise ReplayError(f"{step.rule_id}: sub-verdict {name} not supported")
                replay(sub, dossiers[name], blocks, dossiers, principal)
            elif key == "factor_status":
                if not step.support or step.support[0].status.value != val:
                    raise ReplayError(f"{step.rule_id}: factor verdict not supported")
                sub = step.support[0]
                f = dossier.o_pprime_decomposition.simple_factors[0]
                if sub.subject in dossiers and sub.subject == f.dossier_ref:
                    replay(sub, dossiers[sub.subject], blocks, dossiers, principal)
                elif sub.subject == f"block {f.verdict_ref}":
                    rec = blocks.get(f.verdict_ref)
                    if rec is None or block_status(block_facts(f.verdict_ref, rec)) is not sub.status:
                        raise ReplayError(f"{step.rule_id}: factor block does not support {val}")
                else:
                    raise ReplayError(f"{step.rule_id}: factor verdict from unknown source")
            elif key.startswith("block."):
                if key == "block.id":
                    rec = blocks.get(val)
                    if rec is None or val not in dossier.block_refs:
                        raise ReplayError(f"{step.rule_id}: block {val} not linked")
                    fresh = block_facts(val, rec)
                    for k, v in fresh.items():
                        if inputs.get(k) != v:
                            raise ReplayError(f"{step.rule_id}: {k} differs on recomputation")
            elif key in ("subgroup_name", "quotient_solvable_p_prime", "same_block_idempotent"):
                if not any(vars(c) == {k: inputs[k] for k in vars(c)} for c in dossier.normal_chain):
                    raise ReplayError(f"{step.rule_id}: normal_chain entry not in dossier")
            elif key.startswith("equivalence."):
                e = {k.split(".", 1)[1]: v for k, v in inputs.items() if k.startswith("equivalence.")}
                if e not in [vars(x) for x in dossier.equivalences]:
                    raise ReplayError(f"{step.rule_id}: equivalence edge not in dossier")
            elif key == "mod_o_p_prime":
                if dossier.mod_o_p_prime != val:
                    raise ReplayError(f"{step.rule_id}: quotient reference mismatch")
            else:
                if dossier.fact(key) != val:
                    raise ReplayError(f"{step.rule_id}: {key} recorded {val!r}, dossier has "
                                      f"{dossier.fact(key)!r}")
        if rule.condition(inputs) is not step.conclusion:
            raise ReplayError(f"{step.rule_id}: condition does not yield {step.conclusion.value}")
    statuses = {s.conclusion for s in verdict.trace}
    if len(statuses) > 1:
        raise ReplayError("trace mixes conclusions")
    expect = statuses.pop() if statuses else Status.UNKNOWN
    if expect is not verdict.status:
        raise ReplayError(f"trace implies {expect.value}, verdict says {verdict.status.value}")

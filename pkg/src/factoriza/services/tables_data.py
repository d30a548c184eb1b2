"""Every row of the seven tables as data, wired to its witness builder.

Rows carry group shapes in the ASCII notation read by ``shape_order`` and
ℓ as an expression tree. ``instantiate`` turns a row into a
FactorizationInstance, or into an ``Intractable`` marker when no witness is
built at desk scale. ``order_arithmetic`` checks the shapes against each
other with integer arithmetic only.
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Iterator

from src.factoriza.config import config
from src.factoriza.models.report import VerificationReport
from src.factoriza.models.table import ArithmeticFinding, CoverageLine, TableId, TableRow, Tractability
from src.factoriza.services.constructions import build_case
from src.factoriza.services.factorization import FactorizationInstance
from src.factoriza.services.formula import Expr, gcd, lift, m, n, q, shape_order
from src.factoriza.services.witnesses import (
    T3,
    T4,
    T5,
    T6,
    T7,
    EXACT_OUTER,
    EXACT_VARIANTS,
    TYPE2_ROWS,
    TYPE3_ROWS,
    ell_witness,
    ell_witness_check,
    exact_family,
    exact_row,
    type2_row,
    type3_row,
)
from src.factoriza.utils.exceptions import SelectorError, ValidationError

logger = logging.getLogger(__name__)

T1 = "T1 (Type I families)"
T2 = "T2 (Type I factors)"
TITLES = {
    TableId.T1: T1,
    TableId.T2: T2,
    TableId.T3: T3,
    TableId.T4: T4,
    TableId.T5: T5,
    TableId.T6: T6,
    TableId.T7: T7,
}

NOT_MODELED = "construction not modeled"

# rows whose witness needs an optional J2.2 or HS.2 asset
OPTIONAL_ROWS = frozenset({"T3/J2", "T3/HS", "T4/45", "T4/46"})


@dataclass(frozen=True)
class Intractable:
    """Returned by ``instantiate`` for a row without a desk-scale witness."""

    key: str
    reason: str


Params = dict[str, Any]
Condition = Callable[[Params], bool]


def _always(_: Params) -> bool:
    return True


# ---------------------------------------------------------------------------
# ℓ formulas

_E = gcd(4, q**m + 1) / 2  # e = 2 when q^m = 3 mod 4, else 1 (q odd)

ELL_CASE = {
    1: (q**n - 1) / (q - 1),
    2: q**3 * (q**3 - 1) / gcd(2, q - 1),
    3: q**m * (q**m - 1),
    4: q**2 * (q**2 - 1),
    5: q**3 * (q**2 - 1),
    6: q ** (2 * m) * (q ** (2 * m) - 1) / (q + 1),
    7: q ** (m * (m + 1) / 2) * (q**m - 1) / _E,
    8: q**m * (q**m - 1) / gcd(2, q - 1),
    9: q**4 * (q**4 - 1) / gcd(2, q - 1),
}


# ---------------------------------------------------------------------------
# Type I: overgroups (T1) and least factors (T2)

_TYPE1 = [
    # case, G0, A, B, conditions, defaults, condition check
    (1, "PSL_n(q)", "(q^n-1)/((q-1)d):n", "q^{n-1}:SL_{n-1}(q)", "d = (n,q-1)", {"n": 3, "q": 2},
     lambda p: p["n"] >= 2),
    (2, "PSL_4(q)", "q^3:(q^3-1)/d:3 < P_k", "PSp_4(q)", "d = (4,q-1), k in {1,3}", {"q": 2}, _always),
    (3, "PSp_2m(q)", "q^{m(m+1)/2}:(q^m-1).m < P_m", "Omega-_2m(q)", "m >= 2, q even", {"m": 3, "q": 2},
     lambda p: p["m"] >= 2 and p["q"] % 2 == 0),
    (4, "PSp_4(q)", "q^3:(q^2-1).2 < P_1", "Sp_2(q^2)", "q even", {"q": 2}, lambda p: p["q"] % 2 == 0),
    (5, "PSp_4(q)", "q^{1+2}:(q^2-1)/2.2 < P_1", "PSp_2(q^2)", "q odd", {"q": 3}, lambda p: p["q"] % 2 == 1),
    (6, "PSU_2m(q)", "q^{m^2}:(q^2m-1)/((q+1)d).m < P_m", "SU_{2m-1}(q)", "m >= 2, d = (2m,q+1)",
     {"m": 2, "q": 2}, lambda p: p["m"] >= 2),
    (7, "Omega_2m+1(q)", "(q^{m(m-1)/2}.q^m):(q^m-1)/2.m < P_m", "Omega-_2m(q)", "m >= 3, q odd",
     {"m": 3, "q": 3}, lambda p: p["m"] >= 2 and p["q"] % 2 == 1),
    (8, "POmega+_2m(q)", "q^{m(m-1)/2}:(q^m-1)/d.m < P_k", "Omega_{2m-1}(q)",
     "m >= 5, d = (4,q^m-1), k in {m,m-1}", {"m": 4, "q": 2}, lambda p: p["m"] >= 4),
    (9, "POmega+_8(q)", "q^6:(q^4-1)/d.4 < P_k", "Omega_7(q)", "d = (4,q^4-1), k in {1,3,4}", {"q": 2},
     _always),
]

_TYPE2_SHAPES = {
    1: ("PGL_n(q)", "(q^n-1)/(q-1)", "P_1"),
    2: ("PSL_4(q).(2 if q = 1 mod 4)", "q^3:(q^3-1)/(2,q-1)", "PGSp_4(q)"),
    3: ("Sp_2m(q)", "q^m:(q^m-1)", "O-_2m(q)"),
    4: ("Sp_4(q)", "q^2:(q^2-1)", "Sp_2(q^2).2"),
    5: ("PGSp_4(q)", "q^{1+2}:(q^2-1)", "PGSp_2(q^2).2"),
    6: ("PGU_2m(q)", "q^2m:(q^2m-1)/(q+1)", "N_1"),
    7: ("SO_2m+1(q)", "(q^{m(m-1)/2}.q^m):(q^m-1)/e", "N_1^-"),
    8: ("Omega+_2m(q) (q even), PSO+_2m(q) (q odd)", "q^m:(q^m-1)/(2,q-1)", "N_1"),
    9: ("Omega+_8(q) (q even), PSO+_8(q) (q odd)", "q^4:(q^4-1)/(2,q-1)", "N_1"),
}


# ---------------------------------------------------------------------------
# ℓ(G0)

_ELL_PARAM = [
    # family, (G, H, K), ℓ, conditions, defaults, check
    ("A_n", ("S_n", "C_n", "S_{n-1}"), lift(n), "n >= 5", {"n": 8}, lambda p: p["n"] >= 5),
    ("PSL2(q)", ("PGL_2(q)", "C_{q+1}", "P_1"), q + 1, "q >= 5, q != 5,7,9,11", {"q": 8},
     lambda p: p["q"] >= 4),
    ("PSL_n(q)", ("PGL_n(q)", "(q^n-1)/(q-1)", "P_1"), ELL_CASE[1], "n >= 3, (n,q) != (4,2)",
     {"n": 3, "q": 2}, lambda p: p["n"] >= 3),
    ("PSU_2m(q)", ("PGU_2m(q)", "q^2m:(q^2m-1)/(q+1)", "N_1"), ELL_CASE[6],
     "m >= 2, (m,q) != (2,2),(2,3),(2,8)", {"m": 2, "q": 2}, lambda p: p["m"] >= 2),
    ("PSp_2m(q)", ("PSp_2m(q)", "q^m:(q^m-1)", "O-_2m(q)"), ELL_CASE[3], "m >= 2, q even, (m,q) != (2,2)",
     {"m": 3, "q": 2}, lambda p: p["m"] >= 2 and p["q"] % 2 == 0),
    ("PSp4(q)", ("PGSp_4(q)", "q^{1+2}:(q^2-1)", "PGSp_2(q^2).2"), ELL_CASE[5], "q >= 5 odd", {"q": 3},
     lambda p: p["q"] % 2 == 1),
    ("Omega_2m+1(q)", ("SO_2m+1(q)", "(q^{m(m-1)/2}.q^m):(q^m-1)/e", "N_1^-"), ELL_CASE[7], "m >= 3",
     {"m": 3, "q": 3}, lambda p: p["m"] >= 3 and p["q"] % 2 == 1),
    ("POmega+_2m(q)", ("Omega+_2m(q) or PSO+_2m(q)", "q^m:(q^m-1)/d", "N_1"), ELL_CASE[8], "m >= 4, d = (2,q-1)",
     {"m": 4, "q": 2}, lambda p: p["m"] >= 4),
]

_ELL_FIXED = [
    # family, G, H, K, ℓ, tractable
    ("PSL2(7)", "PSL2(7)", "C7", "S4", 7, True),
    ("PSL2(11)", "PSL2(11)", "C11", "A5", 11, True),
    ("PSU3(3)", "PSU3(3)", "3_+^{1+2}:8", "PSL2(7)", 216, True),
    ("PSU3(5)", "PSU3(5)", "5_+^{1+2}:8", "A7", 1000, False),
    ("PSU3(8)", "PSU3(8).3^2", "57:9", "2^{3+6}:(63:3)", 513, True),
    ("PSU4(3)", "PSU4(3).2", "3^4:2", "PSL3(4).2", 162, False),
    ("PSU4(8)", "PSU4(8).3", "(513:3).3", "(2^{12}.SL2(64).7).3", 4617, False),
    ("PSp4(3)", "PSp4(3)", "3_+^{1+2}", "2^4:A5", 27, True),
    ("M11", "M11", "C11", "M10", 11, True),
    ("M12", "M12", "D12", "M11", 12, True),
    ("M22", "M22.2", "D22", "PSL3(4).2", 22, True),
    ("M23", "M23", "C23", "M22", 23, True),
    ("M24", "M24", "S4", "M23", 24, True),
    ("J2", "J2.2", "5^2:4", "G2(2)", 100, True),
    ("HS", "HS.2", "5^2:4", "M22.2", 100, True),
    ("He", "He.2", "7_+^{1+2}:6", "Sp4(4).4", 2058, False),
    ("Suz", "Suz.2", "3^5:12", "G2(4).2", 2916, False),
]


# ---------------------------------------------------------------------------
# exact factorizations; @ is the outer part O <= C2, O = @1 @2

_EXACT = {
    1: ("A8.@", ["AGL1(8)"], ["(A5 x 3).2.@"]),
    2: ("A8.@", ["AGammaL1(8)"], ["S5 x @"]),
    3: ("A25", ["5^2:SL2(3)"], ["A23"]),
    4: ("S25", ["5^2:SL2(3)"], ["S23", "A23 x 2"]),
    5: ("A32.@", ["AGammaL1(32)"], ["(A29 x 3).2.@"]),
    6: ("A49", ["7^2:Q8.S3"], ["A47"]),
    7: ("S49", ["7^2:Q8.S3"], ["S47", "A47 x 2"]),
    8: ("A121.@", ["11^2:SL2(3).5.@"], ["A119"]),
    9: ("S121", ["11^2:SL2(3).5"], ["S119", "A119 x 2"]),
    10: ("A529", ["23^2:SL2(3).22"], ["A527"]),
    11: ("S529", ["23^2:SL2(3).22"], ["S527", "A527 x 2"]),
    12: ("PSL2(11).@", ["11:@"], ["A5"]),
    13: ("PSL2(11).@", ["11:(5 x @1)"], ["A4.@2"]),
    14: ("PSL2(23).@", ["23:(11 x @)"], ["S4"]),
    15: ("PSL2(29)", ["29:7"], ["A5"]),
    16: ("PSL2(59).@", ["59:(29 x @)"], ["A5"]),
    17: ("PSL3(3).@", ["13:(3 x @)"], ["AGammaL1(9)"]),
    18: ("PGammaL3(4).@", ["7:(3 x @).S3"], ["2^4:(3 x D10).2"]),
    19: ("PSL3(8).(3 x @)", ["73:(9 x @1)"], ["2^{3+6}:7^2:(3 x @2)"]),
    20: ("PGL4(3)", ["(3^3:13:3).2"], ["((4 x PSL2(9)):2).2"]),
    21: ("PSL4(3).2^2", ["(3^3:13:3).2"], ["((4 x PSL2(9)):2).2^2"]),
    22: ("PGammaL4(4).@", ["(2^6:63:3).2"], ["((5 x PSL2(16)):2).2.@"]),
    23: ("PSL5(2).@", ["31:(5 x @)"], ["2^6:(S3 x PSL3(2))"]),
    24: ("PSU3(8).3^2.@", ["57:9.@1"], ["2^{3+6}:(63:3).@2"]),
    25: ("PSU4(3).2",
         ["3^4:2", "3^3.6", "3^3.D6", "3_+^{1+2}.6", "3_-^{1+2}.6", "3_+^{1+2}.D6", "3_-^{1+2}.D6"],
         ["PSL3(4).2"]),
    26: ("PGU4(3)", ["3^4:4"], ["PSL3(4).2"]),
    27: ("PSU4(3).2^2", ["3^4:2^2", "3^3.D12", "3^3.(6 x 2)", "3^2.3^2.2^2"], ["PSL3(4).2"]),
    28: ("PSU4(3).2^2",
         ["3^4:2", "3^3.6", "3^3.D6", "3_+^{1+2}.6", "3_-^{1+2}.6", "3_+^{1+2}.D6", "3_-^{1+2}.D6"],
         ["PSL3(4).2^2"]),
    29: ("PSU4(3).D8", ["3^4:2^2", "3^4:4", "3^3.D12", "3^3.(6 x 2)", "3^2.3^2.2^2"], ["PSL3(4).2^2"]),
    30: ("PSU4(8).3.@", ["(513:3).3.@1"], ["(2^{12}.SL2(64).7).3.@2"]),
    31: ("PSp4(3).@", ["3_+^{1+2}:@1", "3_-^{1+2}:@1"], ["2^4:(A5.@2)"]),
    32: ("PSp4(3).@", ["3_+^{1+2}:(Q8.@1)"], ["@2.S5"]),
    33: ("PGSp4(3)", ["2^4:5:4"], ["3_+^{1+2}:S3", "3^3:S3"]),
    34: ("PGSp6(3)", ["(3_+^{1+4}:2^{1+4}.D10).2"], ["PSL2(27).6"]),
    35: ("Omega8+(2).@", ["2^6:15", "2^4:15.4"], ["A9.@"]),
    36: ("M11", ["C11"], ["M10"]),
    37: ("M11", ["11:5"], ["(3^2:Q8).2"]),
    38: ("M12.@", ["(3^2:Q8).2"], ["PSL2(11).@"]),
    39: ("M12", ["C6 x C2", "A4", "D12"], ["M11"]),
    40: ("M12.2", ["S4", "D24", "D8 x 3", "3:D8"], ["M11"]),
    41: ("M22.2", ["D22"], ["PSL3(4).2"]),
    42: ("M23", ["C23"], ["M22"]),
    43: ("M23", ["23:11"], ["PSL3(4).2", "2^4:A7"]),
    44: ("M24", ["S4", "D24", "D8 x 3", "3:D8", "A4 x 2"], ["M23"]),
    45: ("J2.2", ["5^2:4"], ["G2(2)"]),
    46: ("HS.2", ["5^2:4"], ["M22.2"]),
    47: ("He.2", ["7_+^{1+2}:6"], ["Sp4(4).4"]),
}

_EXACT_WITNESSED = {1, 2, 3, 4, 5, 6, 7, 8, 9, 12, 13, 14, 15, 16, 17, 19, 23, 24, 31, 32, *range(36, 47)}

_EXACT_NOTES = {
    4: "only K = S23 is built",
    7: "only K = S47 is built",
    9: "only K = S119 is built",
    8: "orbit counting on 14520 ordered pairs is partial",
    45: "needs the optional J2.2 asset",
    46: "needs the optional HS.2 asset",
}

_FAMILIES = {
    "i": ("S_n", "C_n", "S_{n-1}", lift(n), "", {"n": 6}, lambda p: p["n"] >= 2),
    "ii": ("S_{p^a}", "AGL_1(p^a)", "S_{p^a-2}", q * (q - 1), "q a prime power", {"q": 8},
           lambda p: p["q"] >= 3),
    "iii": ("PGL_n(q)", "(q^n-1)/(q-1)", "P_1", ELL_CASE[1], "", {"n": 3, "q": 2}, lambda p: p["n"] >= 2),
    "iv": ("Sp_2m(q)", "q^m:(q^m-1)", "Omega-_2m(q)", ELL_CASE[3], "m >= 3 odd, q even", {"m": 3, "q": 2},
           lambda p: p["m"] >= 3 and p["m"] % 2 == 1 and p["q"] % 2 == 0),
}


# ---------------------------------------------------------------------------
# Type II and Type III

_TYPE_II = {
    1: ("PSL2(11)", "C11", "A5", 11),
    2: ("PGammaL2(16)", "D34.4", "2.S5", 136),
    3: ("PSL2(19)", "19:9", "A5", 171),
    4: ("PSL2(29)", "29:7", "A5", 203),
    5: ("PSL2(59)", "59:29", "A5", 1711),
    6: ("PGL4(3)", "2^4:5", "3^3:GL3(3)", 80),
    7: ("PGL4(3)", "(3^3:13:3).2", "((4 x PSL2(9)):2).2", 2106),
    8: ("PGammaL4(4)", "(2^6:63:3).2", "((5 x PSL2(16)):2).2", 24192),
    9: ("PSL5(2)", "31:5", "2^6:(S3 x PSL3(2))", 155),
    10: ("PSp4(3)", "3_+^{1+2}", "2^4:A5", 27),
    11: ("PSp4(3)", "3_+^{1+2}", "2^4:A5", 27),
    12: ("PSp4(5)", "5_+^{1+2}:2.A4", "PSL2(25).2", 3000),
    13: ("PSp4(7)", "7_+^{1+2}:2.S4", "PSL2(49).2", 16464),
    14: ("PSp4(11)", "11_+^{1+2}:10.A4", "PSL2(121).2", 159720),
    15: ("PSp4(23)", "23_+^{1+2}:20.S4", "PSL2(529).2", 6424176),
    16: ("Sp6(2)", "3_+^{1+2}:Q8", "S8", 216),
    17: ("PGSp6(3)", "(3_+^{1+4}:2^{1+4}.D10).2", "(PSL2(27):3).2", 155520),
    18: ("PSU3(3)", "3_+^{1+2}:8", "PSL2(7)", 216),
    19: ("PSU3(5)", "5_+^{1+2}:8", "A7", 1000),
    20: ("PSU4(3).2", "3^4:2", "PSL3(4).2", 162),
    21: ("PSU4(8).3", "(513:3).3", "(2^{12}.SL2(64).7).3", 4617),
    22: ("Omega7(3)", "3^3:2^4.5", "G2(3)", 19440),
    23: ("Omega7(3)", "3^{3+3}:13", "Sp6(2)", 9477),
    24: ("Omega9(3)", "3^{6+4}:2^{1+4}.5", "Omega8-(3).2", 9447840),
    25: ("Omega8+(2)", "2^2:15.4", "Sp6(2)", 240),
    26: ("Omega8+(2)", "2^6:15", "A9", 960),
    27: ("PSO8+(3)", "3^4.4.D10", "SO7(3)", 3240),
    28: ("POmega8+(3)", "3^6:(3^3:13)", "Omega8+(2)", 255879),
}

_TYPE_III = {
    1: ("PSL2(7)", "C7", ["S4"], 7),
    2: ("PSL2(11)", "11:5", ["A4"], 55),
    3: ("PSL2(23)", "23:11", ["S4"], 253),
    4: ("PSL3(3)", "C13", ["3^2:2.S4"], 13),
    5: ("PSL3(3)", "13:3", ["AGammaL1(9)"], 39),
    6: ("PSL3(4).S3", "7:3.S3", ["2^4:(3 x D10).2"], 126),
    7: ("PSL3(8).3", "73:9", ["2^{3+6}:7^2:3"], 657),
    8: ("PSU3(8).3^2", "57:9", ["2^{3+6}:(63:3)"], 513),
    9: ("PSU4(2)", "2^4:5", ["3_+^{1+2}:2.A4"], 80),
    10: ("PSU4(2)", "2^4:D10", ["3_+^{1+2}:2.A4"], 160),
    11: ("PSU4(2).2", "2^4:5:4", ["3_+^{1+2}:S3", "3^3:S3"], 320),
}


# ---------------------------------------------------------------------------
# assembly


_CONDITIONS: dict[str, Condition] = {}


def _index_or_none(G: str, K: str) -> int | None:
    try:
        return shape_order(G) // shape_order(K)
    except ValidationError:
        return None


def _untracked(G: str, K: str, ell: int | None = None) -> tuple[Tractability, str]:
    index = _index_or_none(G, K)
    if index is not None and index > config.COSET_CAP:
        return Tractability.INTRACTABLE, f"|G:K| = {index} exceeds the coset cap"
    # the orbit and fixed-point checks enumerate H
    if ell is not None and ell > config.DOMAIN_CAP:
        return Tractability.INTRACTABLE, f"ℓ = {ell} exceeds the domain cap"
    return Tractability.ORDER_ONLY, NOT_MODELED


def _cite(table: TableId, row: str) -> str:
    return f"{TITLES[table]} case {row}"


def _build_rows() -> list[TableRow]:
    rows: list[TableRow] = []

    def add(row: TableRow, check: Condition = _always) -> None:
        rows.append(row)
        _CONDITIONS[row.key] = check

    for case, G0, A, B, cond, defaults, check in _TYPE1:
        add(
            TableRow(
                table=TableId.T1, row=str(case), G=G0, H=[A], K=[B], conditions=cond, defaults=defaults,
                tractability=Tractability.VERIFIED, reason=f"witnessed by T2 case {case}",
                citation=_cite(TableId.T1, str(case)),
            ),
            check,
        )
    for case, G0, A, B, cond, defaults, check in _TYPE1:
        G1, H1, K1 = _TYPE2_SHAPES[case]
        add(
            TableRow(
                table=TableId.T2, row=str(case), G=G1, H=[H1], K=[K1], ell=ELL_CASE[case], conditions=cond,
                defaults=defaults, tractability=Tractability.VERIFIED, citation=_cite(TableId.T2, str(case)),
            ),
            check,
        )
    for family, (G, H, K), ell, cond, defaults, check in _ELL_PARAM:
        add(
            TableRow(
                table=TableId.T3, row=family, G=G, H=[H], K=[K], ell=ell, conditions=cond, defaults=defaults,
                tractability=Tractability.VERIFIED, citation=_cite(TableId.T3, family),
            ),
            check,
        )
    for family, G, H, K, value, tractable in _ELL_FIXED:
        state, reason = (Tractability.VERIFIED, "") if tractable else _untracked(G, K, value)
        if family in ("J2", "HS"):
            reason = f"needs the optional {family}.2 asset"
        add(
            TableRow(
                table=TableId.T3, row=family, G=G, H=[H], K=[K], ell=lift(value), tractability=state,
                reason=reason, citation=_cite(TableId.T3, family),
            )
        )
    for case, (G, Hs, Ks) in _EXACT.items():
        if case in _EXACT_WITNESSED:
            state, reason = Tractability.VERIFIED, _EXACT_NOTES.get(case, "")
        else:
            state, reason = _untracked(G.replace("@", "1"), Ks[0].replace("@", "1"))
        add(
            TableRow(
                table=TableId.T4, row=str(case), G=G, H=Hs, K=Ks, tractability=state, reason=reason,
                citation=_cite(TableId.T4, str(case)),
            )
        )
    for which, (G, H, K, ell, cond, defaults, check) in _FAMILIES.items():
        add(
            TableRow(
                table=TableId.T5, row=which, G=G, H=[H], K=[K], ell=ell, conditions=cond, defaults=defaults,
                tractability=Tractability.VERIFIED, citation=_cite(TableId.T5, f"({which})"),
            ),
            check,
        )
    for case, (G, H, K, value) in _TYPE_II.items():
        state, reason = (Tractability.VERIFIED, "") if case in TYPE2_ROWS else _untracked(G, K, value)
        add(
            TableRow(
                table=TableId.T6, row=str(case), G=G, H=[H], K=[K], ell=lift(value), tractability=state,
                reason=reason, citation=_cite(TableId.T6, str(case)),
            )
        )
    add(
        TableRow(
            table=TableId.T7, row="0", G="PGL_2(q)", H=["C_{q+1}"], K=["P_1"], ell=q + 1, conditions="q >= 4",
            defaults={"q": 5}, tractability=Tractability.VERIFIED, citation=_cite(TableId.T7, "0"),
        ),
        lambda p: p["q"] >= 4,
    )
    for case, (G, H, Ks, value) in _TYPE_III.items():
        state, reason = (Tractability.VERIFIED, "") if case in TYPE3_ROWS else _untracked(G, Ks[0], value)
        add(
            TableRow(
                table=TableId.T7, row=str(case), G=G, H=[H], K=Ks, ell=lift(value), tractability=state,
                reason=reason, citation=_cite(TableId.T7, str(case)),
            )
        )
    return rows


@lru_cache(maxsize=1)
def _rows() -> dict[str, TableRow]:
    rows = {row.key: row for row in _build_rows()}
    logger.debug("table data: %d rows", len(rows))
    return rows


def all_rows(table: TableId | str | None = None) -> list[TableRow]:
    rows = list(_rows().values())
    if table is None:
        return rows
    tid = _table_id(table)
    return [r for r in rows if r.table is tid]


def _table_id(table: TableId | str) -> TableId:
    try:
        if isinstance(table, TableId):
            return table
        return TableId(str(table).strip().upper())
    except ValueError:
        raise SelectorError(f"unknown table {table}", {"known": [t.value for t in TableId]}) from None


def lookup(table: TableId | str, row: int | str) -> TableRow:
    """The row with the given case number or family name.

    The exact families table is keyed by (i)-(iv); a numeric case there is
    read as a case of the exact-factorization table.

    Raises:
        SelectorError: unknown table or row.
    """
    tid = _table_id(table)
    if tid is TableId.T5 and str(row).strip().isdigit():
        tid = TableId.T4
    key = f"{tid.value}/{str(row).strip()}"
    try:
        return _rows()[key]
    except KeyError:
        known = [r.row for r in all_rows(tid)]
        raise SelectorError(f"no row {row} in {tid.value}", {"known": known}) from None


def _check_conditions(row: TableRow, params: Params) -> None:
    check = _CONDITIONS.get(row.key, _always)
    try:
        ok = check(params)
    except KeyError as exc:
        raise ValidationError(f"{row.key} needs parameter {exc.args[0]}") from exc
    if not ok:
        raise ValidationError(
            f"{row.key}: parameters violate the row conditions ({row.conditions})",
            {"row": row.key, "params": {k: params[k] for k in sorted(params)}},
        )


def instantiate(row: TableRow, params: Params | None = None) -> FactorizationInstance | Intractable:
    """The witness of a row at the given parameters (the row's defaults when omitted).

    Parameters beyond the formula variables: ``variant`` and ``outer`` for the
    exact-factorization table, ``negative_control`` and ``summand`` for Type I.

    Raises:
        ValidationError: the parameters violate the row's conditions.
    """
    if row.tractability is not Tractability.VERIFIED:
        return Intractable(row.key, row.reason)
    merged: Params = {**row.defaults, **(params or {})}
    _check_conditions(row, merged)
    logger.info("instantiating %s with %s", row.key, merged)
    if row.table in (TableId.T1, TableId.T2):
        return build_case(int(row.row), **merged)
    if row.table is TableId.T3:
        return ell_witness(row.row, **{k: v for k, v in merged.items() if k in "nmq"})
    if row.table is TableId.T4:
        return exact_row(int(row.row), outer=int(merged.get("outer", 1)), variant=merged.get("variant"))
    if row.table is TableId.T5:
        return exact_family(row.row, **{k: v for k, v in merged.items() if k in "nmq"})
    if row.table is TableId.T6:
        return type2_row(int(row.row))
    return type3_row(int(row.row), q=int(merged.get("q", 5)))


def expand(row: TableRow) -> Iterator[Params]:
    """Parameter sets covering every witnessed variant of a row."""
    if row.table is TableId.T4:
        case = int(row.row)
        for outer, variant in itertools.product(EXACT_OUTER.get(case, (1,)), EXACT_VARIANTS.get(case, (None,))):
            params: Params = {}
            if outer > 1:
                params["outer"] = outer
            if variant is not None:
                params["variant"] = variant
            yield params
        return
    yield dict(row.defaults)


def check_ell_row(family: str, **params: int) -> VerificationReport:
    """ell_witness_check with ℓ taken from the row's formula."""
    row = lookup(TableId.T3, family)
    merged = {**row.defaults, **params}
    _check_conditions(row, merged)
    return ell_witness_check(family, ell=row.ell_at(merged), **merged)


# ---------------------------------------------------------------------------
# order arithmetic


def _outer_choices(shapes: list[str]) -> list[dict[str, int]]:
    if not any("@" in s for s in shapes):
        return [{}]
    return [
        {"@": 1, "@1": 1, "@2": 1},
        {"@": 2, "@1": 2, "@2": 1},
        {"@": 2, "@1": 1, "@2": 2},
    ]


def order_arithmetic(row: TableRow) -> list[ArithmeticFinding]:
    """Integer consistency of a row's shapes.

    Exact rows need |G| = |H||K| for every listed H and K, with O = 1 and
    both splits of O = 2. Other rows need |H||K|/|G| to be a positive integer
    and |H| = ℓ. Rows in free parameters are skipped.
    """
    if row.defaults or row.table in (TableId.T1, TableId.T2, TableId.T5):
        return [ArithmeticFinding(key=row.key, consistent=True, detail="parametrized row, not checked")]
    findings = []
    exact = row.table is TableId.T4
    for H, K in itertools.product(row.H, row.K):
        for outer in _outer_choices([row.G, H, K]):
            tag = f"{row.key} H={H} K={K}" + (f" O={outer['@']},O1={outer['@1']}" if outer else "")
            g, h, k = (shape_order(s, outer) for s in (row.G, H, K))
            meet = Fraction(h * k, g)
            problems = []
            if exact and meet != 1:
                problems.append(f"|G| = {g} but |H||K| = {h * k}")
            if not exact and (meet.denominator != 1 or meet < 1):
                problems.append(f"|H||K|/|G| = {meet} is not a positive integer")
            if row.ell is not None and not outer and h != row.ell_at():
                problems.append(f"|H| = {h} but ℓ = {row.ell_at()}")
            findings.append(
                ArithmeticFinding(
                    key=tag, consistent=not problems, meet=str(meet), detail="; ".join(problems),
                    values={"G": g, "H": h, "K": k},
                )
            )
    for f in findings:
        if not f.consistent:
            logger.warning("order arithmetic: %s: %s", f.key, f.detail)
    return findings


def arithmetic_report(tables: tuple[TableId, ...] = (TableId.T3, TableId.T4, TableId.T6, TableId.T7)) -> list[ArithmeticFinding]:
    return [f for t in tables for row in all_rows(t) for f in order_arithmetic(row)]


# ---------------------------------------------------------------------------
# coverage and export


def coverage_report() -> list[CoverageLine]:
    """Per-table counts of verified, order-only and intractable rows, with reasons."""
    lines = []
    for tid in TableId:
        rows = all_rows(tid)
        line = CoverageLine(table=tid, rows=len(rows))
        for r in rows:
            if r.tractability is Tractability.VERIFIED:
                line.verified += 1
            elif r.tractability is Tractability.ORDER_ONLY:
                line.order_only += 1
            else:
                line.intractable += 1
            if r.tractability is not Tractability.VERIFIED or r.reason:
                line.reasons[r.row] = r.reason
        lines.append(line)
    return lines


def export_rows() -> list[dict[str, Any]]:
    """One JSON-ready record per row, in table order."""
    records = []
    for r in all_rows():
        record = r.model_dump(mode="json")
        record["ell_default"] = r.ell_at() if r.ell is not None else None
        records.append(record)
    return records


def ell_of(table: TableId | str, row: int | str, **params: int) -> int | None:
    return lookup(table, row).ell_at(params)


def ell_expr(table: TableId | str, row: int | str) -> Expr | None:
    return lookup(table, row).ell

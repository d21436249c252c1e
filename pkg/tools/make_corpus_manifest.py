"""Write the dossiers and manifest of the bundled corpus.

Block files come from make_gl_blocks.py and extract_oracle_blocks.py; this
script only describes what to check against them.
"""

from pathlib import Path

from rimcheck.blockdata import dumps_json
from rimcheck.verdict import dossier_from_dict, dossier_to_dict

OUT = Path(__file__).resolve().parents[1] / "src" / "rimcheck" / "corpus" / "data"

GL4_PRODUCT = [[4, 2, 1, 2, 1], [2, 3, 2, 1, 0], [1, 2, 2, 1, 0], [2, 1, 1, 2, 1], [1, 0, 0, 1, 1]]
GL5_PRODUCT = [[3, 1, 2, 0, 1], [1, 3, 2, 1, 0], [2, 2, 3, 1, 1], [0, 1, 1, 1, 0], [1, 0, 1, 0, 1]]

ORACLE = ("ORACLE(character-table-library decomposition matrix of the principal 3-block, "
          "transpose-product; see the provenance field of the block file)")
JAMES = "James 1990, Appendix I: unipotent rows of the principal 3-block decomposition matrix"
PUIG = ("Puig equivalence of B_0(kG) and B_0(kN_G(P)) for these families, established in the 2010 "
        "classification of principal 3-blocks with abelian Sylow subgroups (Lemma 3.7)")

PUIG_CASES = [
    # stem, family tag, q, case, dossier name
    ("psu3_5", "PSU3", 5, "(iii)", "PSU3(5)"),
    ("psp4_4", "PSp4_qminus", 4, "(iv)", "PSp4(4)"),
    ("psu4_4", "PSU4", 4, "(vii)", "PSU4(4)"),
    ("psu5_4", "PSU5", 4, "(ix)", "PSU5(4)"),
]


def dossiers():
    out = {
        "psl2_9": {
            "name": "PSL2(9)", "prime": 3,
            "sylow": {"abelian": True, "cyclic": False, "p_rank": 2},
            "predicates": {"perfect_lie_type_defining_char": True, "full_defect": True},
            "notes": "principal block, so of full defect; the flag is still set explicitly. "
                     "Wildness is left unasserted so the verdict rests on the defining-"
                     "characteristic theorem alone.",
        },
        "gl4_5": {
            "name": "GL4(5)", "prime": 3,
            "sylow": {"abelian": True, "cyclic": False, "p_rank": 2},
            "block_refs": ["gl4_unipotent"],
            "notes": "lower-bound Cartan data from the unipotent part of the decomposition matrix",
        },
        "gl5_2": {
            "name": "GL5(2)", "prime": 3,
            "sylow": {"abelian": True, "cyclic": False, "p_rank": 2},
            "block_refs": ["gl5_unipotent"],
            "notes": "lower-bound Cartan data from the unipotent part of the decomposition matrix",
        },
    }
    for stem, fam, q, case, name in PUIG_CASES:
        local = f"N_{name}(P)"
        out[stem] = {
            "name": name, "prime": 3,
            "sylow": {"abelian": True, "cyclic": False, "p_rank": 2},
            "equivalences": [{"target": local, "kind": "puig", "citation": PUIG}],
            "notes": f"family {case} with q={q}",
        }
        out[stem + "_normalizer"] = {
            "name": local, "prime": 3,
            "sylow": {"abelian": True, "cyclic": False, "p_rank": 2},
            "predicates": {"has_nontrivial_normal_p_subgroup": True},
            "notes": "the normalizer of a Sylow 3-subgroup has that Sylow subgroup as a normal subgroup",
        }
    return out


def entries():
    e = []
    for stem, product in (("gl4_unipotent", GL4_PRODUCT), ("gl5_unipotent", GL5_PRODUCT)):
        e.append({"id": stem, "check": "lower_bound_exclusion", "block_file": f"{stem}.block.json",
                  "expected": {"outcome": "Excluded", "matrix": product,
                               "citation": f"{JAMES}; lower bounds rule out the uniserial Cartan shape"},
                  "provenance": "PRINTED(James 1990, Appendix I, unipotent decomposition numbers)"})
    for stem in ("a8_p3", "m22_p3", "on_p3"):
        e.append({"id": stem, "check": "no_diagonal_two", "block_file": f"{stem}.block.json",
                  "expected": {"outcome": "NoDiagonalTwo",
                               "citation": "no Cartan diagonal entry equals 2, so no pattern can occur"},
                  "provenance": ORACLE})
    for stem in ("a7_p3", "m11_p3", "m23_p3", "hs_p3"):
        e.append({"id": stem, "check": "no_patterns", "block_file": f"{stem}.block.json",
                  "expected": {"outcome": "NoPatterns",
                               "citation": "diagonal 2 entries occur but none carries the uniserial shape"},
                  "provenance": ORACLE})
    e.append({"id": "psl3_4_p3", "check": "no_patterns", "block_file": "psl3_4_p3.block.json",
              "expected": {"outcome": "NoPatterns",
                           "citation": "Kunugi 2000, Table 2 (PSL3(q), 3||(q-1)); q=4 is a "
                                       "representative-only check, not the whole family"},
              "provenance": ORACLE})
    e.append({"id": "psp4_8_p3", "check": "column_count", "block_file": "psp4_8_p3.block.json",
              "params": {"min_positive": 3},
              "expected": {"outcome": "AllColumnsAtLeast3",
                           "citation": "White 1995, Table II: every column of the principal block "
                                       "decomposition matrix of PSp4(q), q even, has at least 3 "
                                       "positive entries"},
              "provenance": "ORACLE(White 1995 Table II decomposition numbers; the data file is not "
                            "shipped because no machine-readable 3-modular table of S4(8) was "
                            "available to produce it)"})
    e.append({"id": "psl2_9", "check": "verdict", "dossier_file": "psl2_9.dossier.json",
              "expected": {"outcome": "AllAtEnd", "rules": ["R3"],
                           "citation": "Kawata-Michler-Uno 2001: Lie type in defining characteristic"},
              "provenance": "PRINTED(PSL2(9) is of Lie type in defining characteristic 3)"})
    for stem, fam, q, case, name in PUIG_CASES:
        e.append({"id": f"{stem}_puig", "check": "verdict", "dossier_file": f"{stem}.dossier.json",
                  "expected": {"outcome": "AllAtEnd", "rules": ["R11", "R1"], "citation": PUIG},
                  "provenance": "PRINTED(Puig equivalence, Lemma 3.7 of the 2010 classification)"})
        e.append({"id": f"classify_{stem}", "check": "family",
                  "params": {"family": fam, "params": {"q": q}},
                  "expected": {"outcome": case, "citation": "family list for non-cyclic abelian "
                                                            "Sylow 3-subgroups"},
                  "provenance": "PRINTED(family list after Fong)"})
    for stem, name in (("gl4_5", "gl4_unipotent"), ("gl5_2", "gl5_unipotent")):
        e.append({"id": f"verdict_{stem}", "check": "verdict", "dossier_file": f"{stem}.dossier.json",
                  "expected": {"outcome": "AllAtEnd", "rules": ["R9"],
                               "citation": "Cartan lower bounds exclude the uniserial shape"},
                  "provenance": "PRINTED(James 1990, Appendix I, unipotent decomposition numbers)"})
        e.append({"id": f"nonperiodic_{stem}", "check": "nonperiodic", "block_file": f"{name}.block.json",
                  "expected": {"outcome": "AllNonPeriodic",
                               "citation": "Carlson 1979: a periodic simple module has dimension "
                                           "divisible by p^(rank-1); these dimensions are prime to 3"},
                  "provenance": "PRINTED(unipotent character degrees of GL_n(q), hook formula)"})
    return e


def main():
    for stem, obj in dossiers().items():
        d = dossier_from_dict(obj)  # validates
        (OUT / f"{stem}.dossier.json").write_text(dumps_json(dossier_to_dict(d)) + "\n")
    (OUT / "manifest.json").write_text(dumps_json({"entries": entries()}) + "\n")
    print(f"wrote {len(dossiers())} dossiers and {len(entries())} manifest entries")


if __name__ == "__main__":
    main()

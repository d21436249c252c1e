"""Regenerate the character-table-library block files in the bundled corpus.

Needs a GAP executable with the ctbllib package; pass its path with --gap
(and the GAP root with --gap-root when the binary cannot find it alone).
Run once by a maintainer; the test suite never calls GAP.
"""

import argparse
import ast
import subprocess
import tempfile
from pathlib import Path

from rimcheck.blockdata import dump_block_record, record_from_dict

OUT = Path(__file__).resolve().parents[1] / "src" / "rimcheck" / "corpus" / "data"

# corpus stem -> library table name
TABLES = {
    "a7_p3": "A7",
    "a8_p3": "A8",
    "m11_p3": "M11",
    "m22_p3": "M22",
    "m23_p3": "M23",
    "hs_p3": "HS",
    "on_p3": "ON",
    "psl3_4_p3": "L3(4)",
    "psp4_8_p3": "S4(8)",
}

GAP_TEMPLATE = r"""
LoadPackage("ctbllib" : OnlyNeeded);;
emit := function(stem, name, p)
  local t, m, info, b, ordc, modc, dec, sizes, a, orders;
  t := CharacterTable(name);;
  m := t mod p;;
  if m = fail then Print("RESULT ", [stem, "missing"], "\n"); return; fi;
  info := BlocksInfo(m);;
  b := First([1..Length(info)], i -> 1 in info[i].ordchars);;
  ordc := info[b].ordchars;; modc := info[b].modchars;;
  dec := DecompositionMatrix(m, b);;
  a := Number(Factors(Size(t)), x -> x = p);;
  orders := Set(OrdersClassRepresentatives(t));;
  Print("RESULT ", [stem, name, p, a, info[b].defect, ordc, modc, dec,
        List(Irr(m){modc}, x -> x[1]), Filtered(orders, o -> o mod (p*p) = 0)], "\n");
end;;
"""


def gap_script(prime: int) -> str:
    body = [GAP_TEMPLATE]
    for stem, name in TABLES.items():
        body.append(f'emit("{stem}", "{name}", {prime});')
    body.append("QUIT;")
    return "\n".join(body)


def run_gap(gap: str, root: str | None, script: str) -> list:
    with tempfile.NamedTemporaryFile("w", suffix=".g", delete=False) as fh:
        fh.write(script)
    cmd = [gap, "-q", "-A"] + (["-l", root] if root else []) + [fh.name]
    out = subprocess.run(cmd, capture_output=True, text=True, stdin=subprocess.DEVNULL,
                         timeout=1800).stdout
    # GAP wraps long lines with a trailing backslash
    out = out.replace("\\\n", "")
    # ... and breaks long lists at commas; a result runs until the next marker
    rows = []
    for chunk in out.split("RESULT ")[1:]:
        text = " ".join(line for line in chunk.splitlines() if not line.startswith("#"))
        rows.append(ast.literal_eval(text.strip()))
    if not rows:
        raise SystemExit("GAP produced no results:\n" + out[-2000:])
    return rows


def p_rank(stem: str, a: int, deep_orders: list) -> int:
    # All Sylow 3-subgroups here are abelian.  Without elements of order p^2
    # the Sylow is elementary abelian; the one exception in the list is
    # S4(8), whose Sylow 3-subgroup is the homocyclic torus part C9 x C9.
    if not deep_orders:
        return a
    if stem == "psp4_8_p3":
        return 2
    raise ValueError(f"{stem}: Sylow has elements of order {deep_orders}, rank unknown")


def to_record(row, prime: int) -> dict:
    stem, name, p, a, defect, ord_, mod, dec, dims, deep = row
    rank = p_rank(stem, a, deep)
    command = (f'd := DecompositionMatrix(CharacterTable("{name}") mod {p}, b) with b the block '
               f'whose BlocksInfo ordchars contain 1 (GAP {GAP_VERSION})')
    return {
        "group_id": name,
        "prime": p,
        "block_tag": "principal",
        "defect": defect,
        "group_p_valuation": a,
        "p_rank": rank,
        "wild": rank >= 2,
        "decomposition": {
            "ordinary_labels": [f"chi{i}" for i in ord_],
            "brauer_labels": [f"phi{j}" for j in mod],
            "matrix": dec,
        },
        "simple_dims": dims,
        "provenance": "ORACLE(character-table-library decomposition matrix, transpose-product): " + command,
    }


GAP_VERSION = "unknown"


def main():
    global GAP_VERSION
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gap", default="gap")
    ap.add_argument("--gap-root")
    ap.add_argument("--prime", type=int, default=3)
    ap.add_argument("--out", type=Path, default=OUT)
    args = ap.parse_args()
    ver = run_gap(args.gap, args.gap_root,
                  'Print("RESULT ", [GAPInfo.Version, InstalledPackageVersion("ctbllib")], "\\n");QUIT;')
    GAP_VERSION = "{} / ctbllib {}".format(*ver[0])
    for row in run_gap(args.gap, args.gap_root, gap_script(args.prime)):
        if row[1] == "missing":
            print(f"{row[0]}: no {args.prime}-modular table in the library, skipped")
            continue
        obj = to_record(row, args.prime)
        rec = record_from_dict(obj)  # validates
        path = args.out / f"{row[0]}.block.json"
        path.write_bytes(dump_block_record(rec))
        print(f"wrote {path.name}: {rec.n_simples} simples, defect {rec.defect}, p-rank {rec.p_rank}")


if __name__ == "__main__":
    main()

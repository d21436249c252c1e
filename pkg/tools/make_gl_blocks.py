"""Write the GL_4 / GL_5 unipotent block files of the corpus.

The unipotent rows of the principal 3-block decomposition matrix of GL_n(q)
(3 | q+1) are fixed below.  Simple module dimensions are obtained by
inverting that unitriangular matrix against the unipotent character degrees
(hook formula) at one representative q.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from rimcheck.blockdata import CartanMatrix, DecompositionMatrix, Exactness, BlockRecord, dump_block_record, nu
from rimcheck.exactmat import IntMatrix, transpose_multiply

OUT = Path(__file__).resolve().parents[1] / "src" / "rimcheck" / "corpus" / "data"

CASES = {
    "gl4_unipotent": dict(
        n=4, q=5,
        parts=[(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)],
        labels=["(4)", "(31)", "(2^2)", "(21^2)", "(1^4)"],
        delta=[[1, 0, 0, 0, 0], [1, 1, 0, 0, 0], [0, 1, 1, 0, 0], [1, 1, 1, 1, 0], [1, 0, 0, 1, 1]],
    ),
    "gl5_unipotent": dict(
        n=5, q=2,
        parts=[(5,), (3, 2), (3, 1, 1), (2, 2, 1), (1, 1, 1, 1, 1)],
        labels=["(5)", "(32)", "(31^2)", "(2^21)", "(1^5)"],
        delta=[[1, 0, 0, 0, 0], [0, 1, 0, 0, 0], [1, 1, 1, 0, 0], [0, 1, 1, 1, 0], [1, 0, 1, 0, 1]],
    ),
}


def hooks(part):
    conj = [sum(1 for x in part if x > j) for j in range(part[0])]
    return [part[i] - j - 1 + conj[j] - i for i in range(len(part)) for j in range(part[i])]


def unipotent_degree(part, q):
    n = sum(part)
    num = q ** sum(i * x for i, x in enumerate(part))
    for i in range(1, n + 1):
        num *= q ** i - 1
    den = 1
    for h in hooks(part):
        den *= q ** h - 1
    assert num % den == 0
    return num // den


def lower_unitriangular_solve(delta, rhs):
    x = []
    for i, row in enumerate(delta):
        assert row[i] == 1 and not any(row[i + 1:])
        x.append(rhs[i] - sum(row[j] * x[j] for j in range(i)))
    return x


def order_valuation(n, q, p=3):
    v = 0
    for i in range(1, n + 1):
        v += nu(q ** i - 1, p)
    return v


def main():
    for key, c in CASES.items():
        degs = [unipotent_degree(p, c["q"]) for p in c["parts"]]
        dims = lower_unitriangular_solve(c["delta"], degs)
        d = IntMatrix.from_rows(c["delta"])
        a = order_valuation(c["n"], c["q"])
        rec = BlockRecord(
            group_id=f"GL{c['n']}({c['q']})", prime=3, block_tag="principal",
            defect=a, group_p_valuation=a, p_rank=2, wild=True,
            decomposition=DecompositionMatrix(d, tuple(c["labels"]),
                                              tuple(f"phi{j + 1}" for j in range(5))),
            cartan=CartanMatrix(transpose_multiply(d), Exactness.LOWER_BOUND),
            simple_dims=tuple(dims),
            notes=(f"Unipotent rows only of the principal 3-block decomposition matrix of GL_{c['n']}(q), "
                   f"3 | q+1; the Cartan matrix of the full block is entrywise >= D^T D. "
                   f"simple_dims: unipotent degrees at q={c['q']} (hook formula) {degs} "
                   f"pushed through the inverse of D."),
        )
        (OUT / f"{key}.block.json").write_bytes(dump_block_record(rec))
        print(key, degs, dims)


if __name__ == "__main__":
    main()

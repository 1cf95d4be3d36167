from fractions import Fraction

import pytest

from webrank.catalog import get_family
from webrank.combin import monomial_count
from webrank.expr import EvalError, evaluate, parse
from webrank.jets import (
    degree_multi_indices,
    jet_coefficient,
    jet_matrix,
    positive_vectors,
    quadruple,
    square_block,
    support,
)
from webrank.linalg import exact_det, exact_rank
from webrank.ordinary import GenericPointSampler
from webrank.scalars import EXACT
from webrank.web import GeneratingWeb, assemble

from helpers import reparametrize_entry


def quadrics():
    E, _ = get_family("k0_3_quadrics")
    return E


def test_positive_vectors_order_and_count():
    assert positive_vectors(2, 3) == ((2, 1), (1, 2))
    assert positive_vectors(3, 4) == ((2, 1, 1), (1, 2, 1), (1, 1, 2))
    assert positive_vectors(1, 3) == ((3,),)
    for k in range(1, 5):
        for h in range(k, 9):
            assert len(positive_vectors(k, h)) == monomial_count(k, h - k)


def test_degree_multi_indices_count_and_grouping():
    for n in range(1, 5):
        for h in range(1, 6):
            rows = degree_multi_indices(n, h)
            assert len(rows) == monomial_count(n, h)
            support_sizes = [len(support(L)) for L in rows]
            assert support_sizes == sorted(support_sizes)


def test_degree_multi_indices_block_order_n2_h2():
    assert degree_multi_indices(2, 2) == ((2, 0), (0, 2), (1, 1))


def test_quadruple_labels():
    assert quadruple((2, 0, 1), 3) == (3, 2, 2, 1)
    assert quadruple((0, 3, 0), 3) == (3, 1, 2, 1)
    assert quadruple((1, 1, 1), 3) == (3, 3, 1, 1)
    with pytest.raises(ValueError):
        quadruple((0, 0), 2)


def test_jet_coefficient_values():
    assert jet_coefficient((1, 1), (1, 1)) == 1
    assert jet_coefficient((2, 2, 2), (1, 1, 1)) == 8
    assert jet_coefficient((5, 7), (0, 0)) == 1
    assert jet_coefficient((0, 3), (0, 2)) == 9  # zero entries with zero exponent


def test_square_block_pair_web():
    E = quadrics()
    block = square_block(E.generating_web(2), 3, (Fraction(1), Fraction(2)), EXACT)
    assert block.rows == [(2, 1), (1, 2)]
    assert block.entries == [[1, -1], [1, 1]]
    assert exact_det(block.entries) == 2


def test_square_block_point_web():
    E = quadrics()
    block = square_block(E.generating_web(1), 3, (Fraction(5),), EXACT)
    assert block.entries == [[1]]


def test_square_block_dependent_gradients_always_singular():
    web = GeneratingWeb(
        k=3,
        integrals=(
            parse("x1+x2+x3", 3),
            parse("x1+2*x2+3*x3", 3),
            parse("2*x1+3*x2+4*x3", 3),
        ),
    )
    sampler = GenericPointSampler(seed=3)
    for _ in range(5):
        block = square_block(web, 4, sampler.point(3), EXACT)
        assert exact_det(block.entries) == 0
        assert exact_rank(block.entries)[0] == 2


def test_square_block_requires_right_cardinality():
    web = GeneratingWeb(k=2, integrals=(parse("x1+x2", 2),))
    with pytest.raises(ValueError):
        square_block(web, 3, (Fraction(1), Fraction(1)), EXACT)


def test_jet_matrix_identity_columns_for_coordinates():
    W = assemble(quadrics(), 3)
    point = GenericPointSampler(seed=1).point(3)
    matrix = jet_matrix(W, 1, point, EXACT)
    assert matrix.shape == (3, 10)
    for i in range(3):
        for j in range(3):
            assert matrix.entries[i][j] == (1 if i == j else 0)


def test_jet_matrix_parallel_web_row():
    E = quadrics()
    W = assemble(E, 2)  # the 4-web {x1, x2, x1+x2, x1-x2}
    matrix = jet_matrix(W, 2, GenericPointSampler(seed=2).point(2), EXACT)
    row_index = matrix.rows.index((1, 1))
    assert matrix.entries[row_index] == [0, 0, 1, -1]


def test_jet_matrix_zero_blocks():
    # entries vanish unless the row support is contained in the column support
    W = assemble(quadrics(), 3)
    point = GenericPointSampler(seed=4).point(3)
    for h in (2, 3):
        matrix = jet_matrix(W, h, point, EXACT)
        for L, row in zip(matrix.rows, matrix.entries):
            row_support = set(support(L))
            for entry, web_entry in zip(row, W.entries):
                col_support = set(web_entry.source)
                if not row_support <= col_support:
                    assert entry == 0


def test_jet_matrix_rank_drops_never_below_block_structure():
    W = assemble(quadrics(), 3)
    point = GenericPointSampler(seed=6).point(3)
    for h, expected in [(1, 3), (2, 6), (3, 10)]:
        matrix = jet_matrix(W, h, point, EXACT)
        assert exact_rank(matrix.entries)[0] == expected


def test_column_scaling_under_reparametrization():
    # replacing u by u^3+u scales its jet column by (3u(p)^2+1)^h
    W = assemble(quadrics(), 3)
    point = GenericPointSampler(seed=7).point(3)
    index = 4
    reparametrized = reparametrize_entry(W, index)
    u_value = evaluate(W.entries[index].integral, point)
    scale = 3 * u_value**2 + 1
    for h in (1, 2, 3):
        original = jet_matrix(W, h, point, EXACT)
        changed = jet_matrix(reparametrized, h, point, EXACT)
        for row_o, row_c in zip(original.entries, changed.entries):
            for col, (a, b) in enumerate(zip(row_o, row_c)):
                if col == index:
                    assert b == a * scale**h
                else:
                    assert b == a
        assert exact_rank(original.entries)[0] == exact_rank(changed.entries)[0]


def test_square_block_is_diagonal_block_of_assembled_jets():
    # the (k, a) diagonal block of the top-order jet matrix is the generating
    # block up to variable renaming
    E = quadrics()
    for n in (3, 4):
        W = assemble(E, n)
        point = GenericPointSampler(seed=8).point(n)
        top = jet_matrix(W, 3, point, EXACT)
        for a, source in enumerate(
            [e.source for e in W.entries if e.label[0] == 2 and e.label[2] == 1],
            start=1,
        ):
            sub_point = tuple(point[i - 1] for i in source)
            block = square_block(E.generating_web(2), 3, sub_point, EXACT)
            rows = [
                top.rows.index(L)
                for L in top.rows
                if support(L) == source and quadruple(L, n)[0] == 3
            ]
            cols = [
                idx
                for idx, e in enumerate(W.entries)
                if e.label[0] == 2 and e.source == source
            ]
            extracted = [
                [top.entries[r][c] for c in cols] for r in rows
            ]
            assert extracted == block.entries


def test_jet_matrix_reports_offending_entry():
    E, _ = get_family("k0_3_harmonic_sum")
    W = assemble(E, 2)
    with pytest.raises(EvalError) as err:
        jet_matrix(W, 1, (Fraction(0), Fraction(1)), EXACT)
    assert "entry" in str(err.value)


def test_csv_export(tmp_path):
    E = quadrics()
    block = square_block(E.generating_web(2), 3, (Fraction(1), Fraction(2)), EXACT)
    path = tmp_path / "block.csv"
    with open(path, "w", encoding="utf-8") as handle:
        block.to_csv(handle)
    text = path.read_text()
    assert text.splitlines()[0] == 'multi_index,"2,1,1","2,1,2"'
    assert "1,-1" in text.replace('"', "")

import pytest

from liouville.partitions import YoungDiagram, partition_count, young_diagrams


def euler_pentagonal(nmax):
    p = [1] + [0] * nmax
    for n in range(1, nmax + 1):
        k, total = 1, 0
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > n:
                break
            sign = 1 if k % 2 else -1
            total += sign * p[n - g1]
            g2 = k * (3 * k + 1) // 2
            if g2 <= n:
                total += sign * p[n - g2]
            k += 1
        p[n] = total
    return p


@pytest.mark.parametrize("N", range(0, 16))
def test_counts_match_pentagonal_recurrence(N):
    expected = euler_pentagonal(15)[N]
    assert partition_count(N) == expected
    assert len(young_diagrams(N)) == expected


def test_level_four_order():
    assert [d.parts for d in young_diagrams(4)] == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]


@pytest.mark.parametrize("N", range(1, 9))
def test_diagrams_are_distinct_reverse_lex(N):
    diagrams = young_diagrams(N)
    assert all(d.length == N for d in diagrams)
    parts = [d.parts for d in diagrams]
    assert parts == sorted(set(parts), reverse=True)


def test_level_zero_is_empty_diagram():
    assert young_diagrams(0) == (YoungDiagram(()),)


@pytest.mark.parametrize("parts", [(3, 1, 1), (1,), ()])
def test_str_parse_roundtrip(parts):
    d = YoungDiagram(parts)
    assert YoungDiagram.parse(str(d)) == d


@pytest.mark.parametrize("parts", [(1, 2), (0,), (2, -1)])
def test_invalid_parts_rejected(parts):
    with pytest.raises(ValueError):
        YoungDiagram(parts)


def test_negative_level_rejected():
    with pytest.raises(ValueError):
        young_diagrams(-1)

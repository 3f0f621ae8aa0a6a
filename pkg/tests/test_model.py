import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import multinomial, poisson

import _enumerate as E
from ccmnet.counting import log_graph_count
from ccmnet.errors import ConfigError
from ccmnet.graph import Network, NodeClassification, mixing_matrix
from ccmnet.model import (
    CcmSpec, CongruenceMapping, MultinomialDegree, PoissonMultinomialMixing, PriorSpec, Uniform,
    log_class_size, log_class_size_ratio, log_network_prob_ratio, log_network_weight, log_q_class,
)


@pytest.mark.parametrize("sizes", [(2, 2), (1, 3), (2, 3), (1, 2, 2), (3, 3)])
def test_mixing_class_size_exact(sizes):
    c = NodeClassification.from_sizes(sizes)
    mapping = CongruenceMapping.mixing(c)
    codes = E.all_codes(c.n)
    counts = E.class_sizes(E.mixing_cells(codes, c.labels))
    q = c.q
    for cells, size in counts.items():
        mat = np.zeros((q, q), dtype=int)
        mat[np.triu_indices(q)] = cells
        mat = mat + np.triu(mat, 1).T
        assert round(math.exp(log_class_size(mat, mapping))) == size


def test_perfect_matching_count_is_exact():
    # a 1-regular sequence on 2k nodes has (2k)! / (k! 2^k) realizations
    for k in (2, 5, 20):
        d = np.ones(2 * k, dtype=int)
        exact = math.lgamma(2 * k + 1) - math.lgamma(k + 1) - k * math.log(2)
        assert log_graph_count(d, "bc") == pytest.approx(exact, rel=1e-12)


@given(st.integers(4, 30), st.data())
@settings(max_examples=60, deadline=None)
def test_count_symmetric_under_complement(n, data):
    d = np.array(data.draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n)))
    if d.sum() % 2:
        d[0] = d[0] + 1 if d[0] < n - 1 else d[0] - 1
    comp = (n - 1) - d
    for method in ("bc", "mw"):
        assert log_graph_count(d, method) == pytest.approx(log_graph_count(comp, method), abs=1e-9)


def test_small_degree_counts_close_to_enumeration():
    n = 6
    codes = E.all_codes(n)
    sizes = E.class_sizes(E.degree_distributions(codes, n))
    mapping = CongruenceMapping.degree()
    ratio = np.array([math.exp(log_class_size(np.array(x), mapping)) / size for x, size in sizes.items()])
    # asymptotic estimate: loose at this size but the right order everywhere
    assert np.all((ratio > 0.5) & (ratio < 6))
    assert np.median(np.abs(np.log(ratio))) < np.log(1.5)


def test_log_q_multinomial_matches_scipy():
    theta = np.array([0.1, 0.2, 0.3, 0.4])
    x = np.array([1, 0, 2, 1])
    law = MultinomialDegree(theta)
    assert log_q_class(x, law) == pytest.approx(multinomial.logpmf(x, 4, theta))


def test_log_q_mixing_matches_scipy():
    alpha = np.array([0.5, 0.2, 0.3])
    law = PoissonMultinomialMixing(4.0, alpha)
    mat = np.array([[2, 1], [1, 3]])
    cells = np.array([2, 1, 3])
    want = poisson.logpmf(6, 4.0) + multinomial.logpmf(cells, 6, alpha)
    assert log_q_class(mat, law) == pytest.approx(want)


def test_zero_probability_bin():
    law = MultinomialDegree(np.array([0.5, 0.5, 0.0]))
    assert log_q_class(np.array([1, 1, 1]), law) == -np.inf
    assert log_q_class(np.array([2, 1, 0]), law) > -np.inf


@pytest.mark.parametrize("kind", ["degree", "mixing"])
def test_toggle_ratio_equals_weight_difference(kind):
    rng = np.random.default_rng(3)
    n = 8
    if kind == "degree":
        spec = CcmSpec(CongruenceMapping.degree(), MultinomialDegree(rng.dirichlet(np.ones(n))))
    else:
        c = NodeClassification.from_sizes([3, 5])
        spec = CcmSpec(CongruenceMapping.mixing(c), PoissonMultinomialMixing(6.0, rng.dirichlet(np.ones(3))))
    g = Network(n, [(0, 1), (1, 2), (3, 4), (5, 7), (2, 6)])
    for i, j in [(0, 1), (0, 2), (4, 7), (5, 6)]:
        g2 = g.copy()
        g2.toggle(i, j)
        want = log_network_weight(g2, spec) - log_network_weight(g, spec)
        assert log_network_prob_ratio(g, (i, j), spec) == pytest.approx(want, abs=1e-9)


def test_mixing_ratio_is_binomial_step():
    c = NodeClassification.from_sizes([2, 2])
    mapping = CongruenceMapping.mixing(c)
    g = Network(4, [(0, 2)])
    # cell (0,1) has 4 slots and 1 edge; adding one: C(4,2)/C(4,1)
    assert math.exp(log_class_size_ratio(g, (1, 3), mapping)) == pytest.approx(6 / 4)
    assert math.exp(log_class_size_ratio(g, (0, 2), mapping)) == pytest.approx(1 / 4)
    assert mixing_matrix(g, c)[0, 1] == 1


def test_invalid_laws():
    with pytest.raises((ConfigError, ValueError)):
        MultinomialDegree(np.array([0.5, 0.6]))
    with pytest.raises((ConfigError, ValueError)):
        PoissonMultinomialMixing(-1.0, np.array([1.0]))
    with pytest.raises(ConfigError):
        CongruenceMapping.degree("nope")
    with pytest.raises((ConfigError, ValueError)):
        PriorSpec(dirichlet_alpha0=-1)


def test_uniform_law_has_no_length():
    assert len(Uniform()) == 0
    assert log_q_class(np.array([3, 0, 0]), Uniform()) == 0.0

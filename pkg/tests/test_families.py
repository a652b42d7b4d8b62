import numpy as np
import pytest

from annealgate.families import (PartitionSpec, combined_family,
                                 expected_combined, expected_two_state_entangled,
                                 expected_two_state_product, two_state_entangled,
                                 two_state_product, verify_ground_space)
from annealgate.operators import build_matrix, eigen_decompose, ground_space
from annealgate.state import StateVector, basis_state


def test_entangled_family_all_aligned():
    h = two_state_entangled((1, 1, 1))
    vecs = ground_space(h)
    assert len(vecs) == 2
    span = {int(np.argmax(np.abs(v.amplitudes))) for v in vecs}
    assert span == {0, 7}  # all-up and all-down


def test_entangled_family_mixed_signs():
    h = two_state_entangled((1, -1))
    vecs = ground_space(h)
    span = {int(np.argmax(np.abs(v.amplitudes))) for v in vecs}
    assert span == {1, 2}  # up-down and down-up


def test_entangled_family_eigenvalues():
    spec = eigen_decompose(two_state_entangled((1, 1)))
    assert np.allclose(sorted(spec.eigenvalues), [-4.0, -4.0, 0.0, 0.0])


def test_entangled_family_sign_flip_invariance():
    a = build_matrix(two_state_entangled((1, -1, 1)))
    b = build_matrix(two_state_entangled((-1, 1, -1)))
    assert np.array_equal(a, b)


def test_product_family_single_site_domain():
    spec = PartitionSpec(domains=((1,), (2,)), signs=(1, 1))
    h = two_state_product(spec)
    report = verify_ground_space(h, expected_two_state_product(spec))
    assert report.ok
    span = {int(np.argmax(np.abs(v.amplitudes))) for v in ground_space(h)}
    assert span == {1, 3}  # up-down and down-down


def test_product_family_three_blocks():
    # squared first third, +field middle third, -field last third
    spec = PartitionSpec(domains=((1, 2), (3, 4, 5, 6)), signs=(1, 1, 1, 1, -1, -1))
    h = two_state_product(spec)
    expected = expected_two_state_product(spec)
    report = verify_ground_space(h, expected)
    assert report.ok
    # middle sites anti-aligned with their field, trailing sites aligned up
    pops = np.abs(expected[0].amplitudes) ** 2
    index = int(np.argmax(pops))
    assert format(index, "06b")[2:] == "1100"


def test_product_family_empty_field_reduces_to_entangled():
    spec = PartitionSpec(domains=((1, 2), ()), signs=(1, 1))
    assert np.array_equal(build_matrix(two_state_product(spec)),
                          build_matrix(two_state_entangled((1, 1))))


def test_product_family_requires_squared_domain():
    with pytest.raises(ValueError):
        two_state_product(PartitionSpec(domains=((), (1, 2)), signs=(1, 1)))


def test_combined_family_degeneracy():
    spec = PartitionSpec(domains=((1, 2), (3, 4), (5,)), signs=(1, 1, 1, 1, 1))
    h = combined_family(spec)
    assert eigen_decompose(h).ground_degeneracy == 4
    report = verify_ground_space(h, expected_combined(spec))
    assert report.ok


def test_combined_family_ground_states_orthogonal():
    spec = PartitionSpec(domains=((1, 2), (3, 4), (5,)), signs=(1, -1, 1, 1, -1))
    states = expected_combined(spec)
    overlaps = np.array([[abs(np.vdot(a.amplitudes, b.amplitudes))
                          for b in states] for a in states])
    assert np.allclose(overlaps, np.eye(len(states)), atol=1e-12)


def test_combined_with_one_domain_matches_product_up_to_field_sign():
    signs = (1, 1, -1)
    flipped = (1, 1, 1)  # field domain sign flipped
    combined = combined_family(PartitionSpec(domains=((1, 2), (3,)), signs=signs))
    product = two_state_product(PartitionSpec(domains=((1, 2), (3,)), signs=flipped))
    assert np.array_equal(build_matrix(combined), build_matrix(product))


def test_partition_validation():
    with pytest.raises(ValueError):
        PartitionSpec(domains=((1,), (1, 2)), signs=(1, 1))
    with pytest.raises(ValueError):
        PartitionSpec(domains=((1,),), signs=(1, 1))
    with pytest.raises(ValueError):
        PartitionSpec(domains=((1, 2),), signs=(1, 2))


def test_verify_ground_space_dimension_mismatch():
    h = two_state_entangled((1, 1, 1, 1))
    report = verify_ground_space(h, expected_two_state_entangled((1, 1, 1, 1))[:1])
    assert not report.ok
    assert report.reason == "ground-space dimensions differ"
    assert report.expected_dim == 1 and report.exact_dim == 2


def test_verify_ground_space_accepts_rebased_span():
    h = two_state_entangled((1, 1, 1))
    up, down = basis_state("uuu"), basis_state("ddd")
    ghz_plus = StateVector((up.amplitudes + down.amplitudes) / np.sqrt(2))
    ghz_minus = StateVector((up.amplitudes - down.amplitudes) / np.sqrt(2))
    assert verify_ground_space(h, (ghz_plus, ghz_minus)).ok

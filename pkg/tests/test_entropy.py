import math

import numpy as np
import pytest

from brodylab.common.errors import InvalidParameterError, ValidationError
from brodylab.information.entropy import (DistortionMatrix, JointPmf, Pmf, channel_mutual_information, entropy,
                                          joint_entropy, mutual_information)


def binary_entropy(t):
    return -t * math.log2(t) - (1 - t) * math.log2(1 - t)


def test_binary_entropy():
    assert entropy([0.25, 0.75]) == pytest.approx(0.8112781244591328, rel=1e-12)
    assert entropy(Pmf.uniform(8)) == pytest.approx(3.0)
    assert entropy([0.5, 0.5], unit='nats') == pytest.approx(math.log(2.0))


def test_zero_probabilities_contribute_nothing():
    assert entropy([1.0, 0.0, 0.0]) == 0.0
    assert entropy([0.5, 0.0, 0.5]) == pytest.approx(1.0)


def test_unknown_unit_is_rejected():
    with pytest.raises(InvalidParameterError):
        entropy([0.5, 0.5], unit='hartleys')


@pytest.mark.parametrize('probs', [[0.5, 0.6], [-0.1, 1.1], [], [[0.5, 0.5]], [math.nan, 1.0]])
def test_invalid_pmfs_are_rejected(probs):
    with pytest.raises(ValidationError):
        Pmf(probs)


def test_joint_validation():
    with pytest.raises(ValidationError):
        JointPmf([0.5, 0.5])
    with pytest.raises(ValidationError):
        JointPmf([[0.5, 0.5], [0.5, 0.5]])


def test_mutual_information_of_a_symmetric_joint():
    j = JointPmf([[0.4, 0.1], [0.1, 0.4]])
    assert mutual_information(j) == pytest.approx(1.0 - binary_entropy(0.2), rel=1e-12)
    assert mutual_information(j) == pytest.approx(0.2781, abs=1e-4)


def test_mutual_information_identities(rng):
    w = rng.exponential(size=(3, 4))
    j = JointPmf.normalized(w)
    mi = mutual_information(j)
    assert mi == pytest.approx(entropy(j.marginal_x) + entropy(j.marginal_y) - joint_entropy(j), abs=1e-12)
    assert mi == pytest.approx(mutual_information(j.T), abs=1e-12)
    assert 0.0 <= mi <= min(entropy(j.marginal_x), entropy(j.marginal_y)) + 1e-12


def test_independent_variables_share_nothing():
    j = JointPmf(np.outer([0.2, 0.8], [0.1, 0.3, 0.6]))
    assert mutual_information(j) == pytest.approx(0.0, abs=1e-12)
    assert mutual_information(j) >= 0.0


def test_push_forward_merges_letters():
    j = JointPmf([[0.2, 0.1], [0.3, 0.4]])
    merged = j.push_forward([0, 0], [0, 1])
    np.testing.assert_allclose(merged.matrix, [[0.5, 0.5]])
    assert mutual_information(merged) == 0.0


def test_binary_symmetric_channel():
    channel = np.array([[0.9, 0.1], [0.1, 0.9]])
    assert channel_mutual_information([0.5, 0.5], channel) == pytest.approx(1.0 - binary_entropy(0.1))
    with pytest.raises(ValidationError):
        JointPmf.from_channel(Pmf([1.0]), channel)


def test_distortion_matrices(tmp_path):
    assert DistortionMatrix.hamming(3).matrix.trace() == 0.0
    with pytest.raises(ValidationError):
        DistortionMatrix([[0.0, -1.0]])
    path = tmp_path / 'd.csv'
    path.write_text('0,1\n1,0\n')
    assert DistortionMatrix.from_csv(str(path)).shape == (2, 2)


def test_pmfs_from_csv(tmp_path):
    path = tmp_path / 'p.csv'
    path.write_text('0.25,0.75\n')
    assert entropy(Pmf.from_csv(str(path))) == pytest.approx(0.8112781244591328)
    joint = tmp_path / 'j.csv'
    joint.write_text('0.4,0.1\n0.1,0.4\n')
    assert JointPmf.from_csv(str(joint)).matrix.shape == (2, 2)

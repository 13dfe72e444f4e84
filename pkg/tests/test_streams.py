import numpy as np

from hillnorm.streams import RandomStream


def test_children_are_reproducible_and_distinct():
    s = RandomStream(7)
    a = s.child("replication", 3).uniforms(100)
    b = s.child("replication", 3).uniforms(100)
    c = s.child("replication", 4).uniforms(100)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_uniforms_in_open_interval():
    u = RandomStream(1).uniforms(200_000)
    assert u.min() > 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 0.005


def test_derive_seed_is_stable():
    s = RandomStream(11).child("sweep", "m", "64")
    assert s.derive_seed() == RandomStream(11).child("sweep", "m", "64").derive_seed()
    assert s.derive_seed() != RandomStream(11).child("sweep", "m", "256").derive_seed()

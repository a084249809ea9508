import numpy as np

from holorep.rng import SplitMix64

MASK = (1 << 64) - 1


def reference_splitmix(seed, count):
    # straight transcription of the published algorithm
    x = seed & MASK
    out = []
    for _ in range(count):
        x = (x + 0x9E3779B97F4A7C15) & MASK
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        out.append(z ^ (z >> 31))
    return out


def test_matches_reference_stream():
    g = SplitMix64(1234567)
    assert [g.next_u64() for _ in range(8)] == reference_splitmix(1234567, 8)


def test_known_first_output_for_seed_zero():
    assert SplitMix64(0).next_u64() == 0xE220A8397B1DCDAF


def test_uniform_range_and_determinism():
    a = [SplitMix64(5).uniform() for _ in range(3)]
    g = SplitMix64(5)
    vals = [g.uniform() for _ in range(1000)]
    assert all(0.0 <= v < 1.0 for v in vals)
    assert a[0] == vals[0]


def test_normals_are_roughly_standard():
    g = SplitMix64(9)
    z = g.complex_normals(20000)
    assert abs(np.mean(np.abs(z) ** 2) - 1.0) < 0.05
    assert abs(np.mean(z)) < 0.03


def test_spawn_is_deterministic_and_distinct():
    g1, g2 = SplitMix64(3), SplitMix64(3)
    c1, c2 = g1.spawn(), g2.spawn()
    assert c1.next_u64() == c2.next_u64()
    assert g1.next_u64() != SplitMix64(3).next_u64()


def test_integer_bounds():
    g = SplitMix64(1)
    vals = {g.integer(2, 5) for _ in range(200)}
    assert vals == {2, 3, 4, 5}

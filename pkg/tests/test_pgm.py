import numpy as np
import pytest
from hypothesis import given
from hypothesis.extra.numpy import array_shapes, arrays

from ovc_frontend.core import BadImageFormat
from ovc_frontend.pgm import parse_pgm, read_pgm, write_pgm


@given(arrays(np.uint8, array_shapes(min_dims=2, max_dims=2, max_side=20)))
def test_round_trip(tmp_path_factory, image):
    path = tmp_path_factory.mktemp("pgm") / "x.pgm"
    write_pgm(path, image)
    assert np.array_equal(read_pgm(path), image)


def test_header_comments():
    data = b"P5\n# made by hand\n3 # width\n2\n255\n" + bytes(range(6))
    assert parse_pgm(data).tolist() == [[0, 1, 2], [3, 4, 5]]


@pytest.mark.parametrize("data", [
    b"P2\n1 1\n255\n0",
    b"P5\n2 2\n65535\n" + bytes(8),
    b"P5\n2 2\n255\n" + bytes(3),
    b"P5\n2",
])
def test_rejects(data):
    with pytest.raises(BadImageFormat):
        parse_pgm(data)

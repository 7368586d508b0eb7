import numpy as np
import pytest
import torch

from predcls.data.types import BoundingBox, ObjectInstance, PairExample


@pytest.fixture(autouse=True)
def _torch_seed():
    torch.manual_seed(0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_pair(
    image_id="img0",
    s_cls=0,
    o_cls=1,
    s_box=(10.0, 10.0, 50.0, 60.0),
    o_box=(30.0, 40.0, 90.0, 100.0),
    predicates=(0,),
):
    return PairExample(
        image_id=image_id,
        subject=ObjectInstance(class_id=s_cls, box=BoundingBox(*s_box)),
        object=ObjectInstance(class_id=o_cls, box=BoundingBox(*o_box)),
        gt_predicates=frozenset(predicates),
    )

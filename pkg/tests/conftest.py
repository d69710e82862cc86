import pytest

from framefx.fea import FrameModel
from framefx.sections import SectionPool, SectionShape, circular_properties


def make_shape(name="S", area=10.0, inertia=100.0, sx=20.0, zx=24.0,
               rx=3.0, ry=2.0, depth=10.0) -> SectionShape:
    return SectionShape(name, area, inertia, sx, zx, rx, ry, depth)


def vertical_column(n_elements, length, shape, elastic_modulus=20000.0,
                    tip_load=None, extra_supports=(), loads=None,
                    story_levels=()):
    """Cantilever column along +y, fixed at the base node 0."""
    nodes = tuple((0.0, length * i / n_elements) for i in range(n_elements + 1))
    members = tuple((i, i + 1, 0) for i in range(n_elements))
    if loads is None:
        loads = ((n_elements, tip_load, 0.0, 0.0),) if tip_load else ()
    model = FrameModel(
        nodes=nodes,
        members=members,
        supports=((0, ("ux", "uy", "rot")),) + tuple(extra_supports),
        loads=tuple(loads),
        group_roles=("column",),
        story_levels=tuple(story_levels),
        elastic_modulus=elastic_modulus,
        yield_stress=24.0,
        density=0.00785,
    )
    return model, (shape,)


def portal_frame(height, span, col_shape, beam_shape, loads,
                 elastic_modulus=20000.0, pin_tops_vertically=False):
    """One-bay portal, fixed bases; nodes 0,1 = bases, 2,3 = beam level."""
    supports = [(0, ("ux", "uy", "rot")), (1, ("ux", "uy", "rot"))]
    if pin_tops_vertically:
        supports += [(2, ("uy",)), (3, ("uy",))]
    return FrameModel(
        nodes=((0.0, 0.0), (span, 0.0), (0.0, height), (span, height)),
        members=((0, 2, 0), (1, 3, 0), (2, 3, 1)),
        supports=tuple(supports),
        loads=tuple(loads),
        group_roles=("column", "beam"),
        story_levels=(height,),
        elastic_modulus=elastic_modulus,
        yield_stress=24.0,
        density=0.00785,
    ), (col_shape, beam_shape)


@pytest.fixture
def small_pool():
    return SectionPool(
        [make_shape("A10", area=10.0, depth=8.0),
         make_shape("A20", area=20.0, depth=10.0),
         make_shape("A30", area=30.0, depth=12.0),
         make_shape("A40", area=40.0, depth=14.0)],
        label="toy",
    )


@pytest.fixture
def circ_pool():
    return SectionPool([circular_properties(r) for r in (3.0, 5.0, 8.0, 12.0)],
                       label="toy-circular")

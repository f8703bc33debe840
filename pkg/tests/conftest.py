import pytest

from homotopykit import build_s3, build_t3, subdivide

ACCEPTANCE_LINES = {}


@pytest.fixture(scope="session")
def s3_meshes():
    meshes = {0: build_s3(0)}
    for lv in range(1, 4):
        meshes[lv] = subdivide(meshes[lv - 1])
    return meshes


@pytest.fixture(scope="session")
def s3_l3(s3_meshes):
    return s3_meshes[3]


@pytest.fixture(scope="session")
def s3_l4(s3_meshes):
    return subdivide(s3_meshes[3])


@pytest.fixture(scope="session")
def t3_8():
    return build_t3(8)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])

"""
Pytest Configuration and Fixtures
"""

import pytest
import os
import sys

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))


# ============================================================================
# Field and Preset Fixtures
# ============================================================================

@pytest.fixture(scope="session")
def gaussian_field():
    """Q(sqrt(-1))."""
    from src.arithmetic.ring import field_of
    return field_of(1)


@pytest.fixture(scope="session")
def eisenstein_field():
    """Q(sqrt(-3))."""
    from src.arithmetic.ring import field_of
    return field_of(3)


@pytest.fixture(scope="session")
def apollonian_spec():
    """The Apollonian strip packing, kapollonian(1)."""
    from src.presets import apollonian
    return apollonian()


@pytest.fixture(scope="session")
def kapp2_spec():
    """kapollonian(2)."""
    from src.presets import kapollonian
    return kapollonian(2)


@pytest.fixture(scope="session")
def cuboct_spec():
    """The cuboctahedral packing over Q(sqrt(-6))."""
    from src.presets import cuboctahedral
    return cuboctahedral()


@pytest.fixture(scope="session")
def apollonian_quotient_mod3(apollonian_spec):
    """The Apollonian group reduced mod 3."""
    from src.local.quotient import quotient_group
    return quotient_group(apollonian_spec, 3)


@pytest.fixture
def rng():
    """Seeded random source."""
    import random
    return random.Random(20240611)

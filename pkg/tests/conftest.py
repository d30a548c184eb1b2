import pytest

from src.factoriza import create_app
from src.factoriza.config import TestConfig
from src.factoriza.services.sporadic import mathieu, psp43_deg27


@pytest.fixture
def app():
    """Create and configure a test application instance."""
    app = create_app(TestConfig())
    return app


@pytest.fixture
def client(app):
    """Create a test client for the application."""
    return app.test_client()


@pytest.fixture
def runner(app):
    """Create a test CLI runner for the application."""
    return app.test_cli_runner()


@pytest.fixture(scope="session")
def m12():
    """M12 on 12 points, loaded once per session."""
    return mathieu("M12")


@pytest.fixture(scope="session")
def m24():
    """M24 on 24 points, loaded once per session."""
    return mathieu("M24")


@pytest.fixture(scope="session")
def psp43():
    """PSp4(3) on the 27 totally isotropic lines."""
    return psp43_deg27()

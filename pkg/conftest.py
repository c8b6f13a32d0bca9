import importlib
import os
from pathlib import Path

import django
import pytest

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'tvws_market.settings')
django.setup()

APPS_DIR = Path(__file__).resolve().parent / 'apps'


class LocalAppTestModule(pytest.Module):
    """Import apps/<app>/tests.py as <app>.tests, the name the Django runner uses."""

    def _getobj(self):
        return importlib.import_module(f'{self.path.parent.name}.tests')


def pytest_pycollect_makemodule(module_path, parent):
    if module_path.name == 'tests.py' and module_path.parent.parent == APPS_DIR:
        return LocalAppTestModule.from_parent(parent, path=module_path)
    return None

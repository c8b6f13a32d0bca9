from django.conf import settings
from django.test.runner import DiscoverRunner


class LocalAppsRunner(DiscoverRunner):
    """Without labels, run the tests of every local app by its import name."""

    def build_suite(self, test_labels=None, *args, **kwargs):
        return super().build_suite(test_labels or settings.LOCAL_APPS, *args, **kwargs)

import json

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path

from django import forms
from django.conf import settings
from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _

from .params import ModelParams, SensingParams

PARAM_FIELDS = (
    'alpha1', 'beta1', 'gamma1', 'alpha2', 'beta2', 'gamma2',
    'q_leasing', 'cost_advanced', 'cost_leasing',
)


class ModelParamsForm(forms.Form):
    """Market parameters read from a config file; missing keys take the defaults."""

    alpha1 = forms.FloatField(required=False)
    beta1 = forms.FloatField(required=False, min_value=0)
    gamma1 = forms.FloatField(required=False)
    alpha2 = forms.FloatField(required=False)
    beta2 = forms.FloatField(required=False)
    gamma2 = forms.FloatField(required=False)
    q_leasing = forms.FloatField(required=False)
    cost_advanced = forms.FloatField(required=False, min_value=0)
    cost_leasing = forms.FloatField(required=False, min_value=0)
    lam = forms.FloatField(required=False, min_value=0)

    def _with_default(self, name):
        value = self.cleaned_data.get(name)
        if value is None:
            value = settings.TVWS['DEFAULT_PARAMS'][name]
        return value

    def clean_gamma1(self):
        gamma1 = self._with_default('gamma1')
        if not 0 < gamma1 <= 1:
            raise forms.ValidationError(_('gamma1 must lie in (0, 1].'))
        return gamma1

    def clean_gamma2(self):
        gamma2 = self._with_default('gamma2')
        if not 0 < gamma2 <= 1:
            raise forms.ValidationError(_('gamma2 must lie in (0, 1].'))
        return gamma2

    def clean(self):
        cleaned_data = super().clean()
        if self.errors:
            return cleaned_data
        for name in PARAM_FIELDS:
            if cleaned_data.get(name) is None:
                cleaned_data[name] = settings.TVWS['DEFAULT_PARAMS'][name]

        lam = cleaned_data.get('lam')
        if lam is not None:
            if cleaned_data['beta1'] <= 0:
                raise forms.ValidationError(_('lambda needs beta1 > 0.'))
            cleaned_data['beta2'] = lam * cleaned_data['beta1']

        # Separation of Q_L from the unlicensed utilities is reported by
        # validate_params, not rejected here.
        if min(cleaned_data['alpha2'], cleaned_data['beta2']) <= 0:
            raise forms.ValidationError(_('alpha2 and beta2 must be positive.'))
        return cleaned_data

    def to_params(self):
        return ModelParams(**{name: self.cleaned_data[name] for name in PARAM_FIELDS})


class SensingParamsForm(forms.Form):
    gain = forms.FloatField(required=False)
    cost = forms.FloatField(required=False, min_value=0)

    def clean_gain(self):
        gain = self.cleaned_data.get('gain')
        if gain is None:
            gain = settings.TVWS['SENSING_GAIN']
        if gain <= 0:
            raise forms.ValidationError(_('Sensing gain must be positive.'))
        return gain

    def clean_cost(self):
        cost = self.cleaned_data.get('cost')
        return settings.TVWS['SENSING_COST'] if cost is None else cost

    def to_params(self):
        return SensingParams(g1=self.cleaned_data['gain'], c_s=self.cleaned_data['cost'])


def _read_payload(path):
    path = Path(path)
    try:
        if path.suffix.lower() == '.json':
            return json.loads(path.read_text())
        with path.open('rb') as handle:
            return tomllib.load(handle)
    except OSError as exc:
        raise ValidationError(_('Cannot read config %(path)s: %(error)s'),
                              params={'path': path, 'error': exc}) from exc
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ValidationError(_('Malformed config %(path)s: %(error)s'),
                              params={'path': path, 'error': exc}) from exc


def _bound_form(form_class, payload, allowed):
    unknown = sorted(set(payload) - set(allowed))
    if unknown:
        raise ValidationError(_('Unknown config keys: %(keys)s'), params={'keys': ', '.join(unknown)})
    form = form_class(data=payload)
    if not form.is_valid():
        raise ValidationError(form.errors.as_text())
    return form.to_params()


def parse_params(payload):
    """Validate an already-decoded config mapping into (ModelParams, SensingParams)."""
    if not isinstance(payload, dict):
        raise ValidationError(_('Config must be a table of parameters.'))
    payload = dict(payload)
    sensing_payload = payload.pop('sensing', {}) or {}
    if 'lambda' in payload:
        payload['lam'] = payload.pop('lambda')
    params = _bound_form(ModelParamsForm, payload, PARAM_FIELDS + ('lam',))
    sensing = _bound_form(SensingParamsForm, sensing_payload, ('gain', 'cost'))
    return params, sensing


def load_params_file(path=None):
    """Load parameters from TOML or JSON; with no path, the configured defaults."""
    if path is None:
        return parse_params({})
    return parse_params(_read_payload(path))

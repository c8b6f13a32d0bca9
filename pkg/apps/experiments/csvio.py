import io

import pandas as pd
from django.conf import settings

from market.exceptions import DomainError

SCHEMA_PREFIX = '# schema: '


def render_csv(frame, schema, columns=None):
    """CSV text with a leading schema line; floats use the configured format."""
    if columns is not None:
        frame = frame.reindex(columns=list(columns))
    version = settings.TVWS['CSV_SCHEMA_VERSION']
    body = frame.to_csv(index=False, float_format=settings.TVWS['CSV_FLOAT_FORMAT'], lineterminator='\n')
    return f'{SCHEMA_PREFIX}{schema}/{version}\n{body}'


def write_csv(frame, schema, out, columns=None):
    """Write to a path, or to an open text stream."""
    text = render_csv(frame, schema, columns)
    if hasattr(out, 'write'):
        out.write(text)
    else:
        with open(out, 'w', newline='') as handle:
            handle.write(text)
    return text


def read_csv(source):
    """(schema, version, frame) from text written by `write_csv`."""
    if hasattr(source, 'read'):
        text = source.read()
    else:
        with open(source, newline='') as handle:
            text = handle.read()
    header, _, body = text.partition('\n')
    if not header.startswith(SCHEMA_PREFIX):
        raise DomainError('CSV is missing its schema line')
    schema, _, version = header[len(SCHEMA_PREFIX):].rpartition('/')
    return schema, int(version), pd.read_csv(io.StringIO(body))

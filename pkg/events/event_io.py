import os

import numpy as np
import pandas as pd

from events.camera import CameraModel
from events.event_types import EventCloud
from utils.errors import ParseError, UsageError

EVT_MAGIC = b'EVT1'
EVT_DTYPE = np.dtype([('t', '<f8'), ('x', '<f4'), ('y', '<f4'), ('p', 'i1')])

CAMERA_KEYS = ['fx', 'fy', 'cx', 'cy', 'k1', 'k2', 'k3', 'p1', 'p2', 'width', 'height']


def _check_exists(path):
    if not os.path.isfile(path):
        raise UsageError(f'File not found: {path}')


def write_events(path, cloud: EventCloud):
    records = np.empty(len(cloud), dtype=EVT_DTYPE)
    records['t'] = cloud.t
    records['x'] = cloud.x
    records['y'] = cloud.y
    records['p'] = cloud.polarity
    with open(path, 'wb') as f:
        f.write(EVT_MAGIC)
        f.write(np.uint64(len(cloud)).astype('<u8').tobytes())
        f.write(records.tobytes())


def read_events(path) -> EventCloud:
    """
    Reads events either from the binary EVT1 format or from a CSV file with header `t,x,y,p`.
    """
    _check_exists(path)
    with open(path, 'rb') as f:
        magic = f.read(4)
        if magic == EVT_MAGIC:
            count = int(np.frombuffer(f.read(8), dtype='<u8')[0])
            records = np.frombuffer(f.read(count * EVT_DTYPE.itemsize), dtype=EVT_DTYPE)
            if len(records) != count:
                raise ParseError(path, 1, f'expected {count} events, found {len(records)}')
            return EventCloud(records['t'], records['x'], records['y'], records['p'])

    frame = read_csv(path, ['t', 'x', 'y', 'p'])
    return EventCloud(frame['t'].values, frame['x'].values, frame['y'].values, frame['p'].values)


def read_csv(path, columns) -> pd.DataFrame:
    _check_exists(path)
    try:
        frame = pd.read_csv(path)
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise ParseError(path, 1, str(e))
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise ParseError(path, 1, f'missing columns {missing}, expected header {",".join(columns)}')
    return frame


def write_csv(path, columns: dict):
    pd.DataFrame(columns).to_csv(path, index=False, float_format='%.17g')


def write_event_flows(path, cloud: EventCloud, flows: np.ndarray):
    write_csv(path, {'t': cloud.t, 'x': cloud.x, 'y': cloud.y, 'ux': flows[:, 0], 'uy': flows[:, 1]})


def read_event_flows(path):
    frame = read_csv(path, ['t', 'x', 'y', 'ux', 'uy'])
    cloud = EventCloud(frame['t'].values, frame['x'].values, frame['y'].values)
    return cloud, frame[['ux', 'uy']].values


def read_camera(path) -> CameraModel:
    """
    Reads a camera file consisting of `key=value` lines.
    Distortion coefficients default to zero, all other keys are required.
    """
    _check_exists(path)
    values = {}
    with open(path) as f:
        for line_number, line in enumerate(f, start=1):
            line = line.split('#')[0].strip()
            if not line:
                continue
            if '=' not in line:
                raise ParseError(path, line_number, f'expected key=value, got "{line}"')
            key, value = [s.strip() for s in line.split('=', 1)]
            if key not in CAMERA_KEYS:
                raise ParseError(path, line_number, f'unknown camera key "{key}"')
            try:
                values[key] = int(value) if key in ('width', 'height') else float(value)
            except ValueError:
                raise ParseError(path, line_number, f'invalid number "{value}" for {key}')
    missing = [k for k in ['fx', 'fy', 'cx', 'cy', 'width', 'height'] if k not in values]
    if missing:
        raise ParseError(path, 0, f'missing camera keys {missing}')
    try:
        return CameraModel(**values)
    except ValueError as e:
        raise ParseError(path, 0, str(e))


def write_camera(path, camera: CameraModel):
    with open(path, 'w') as f:
        for key in CAMERA_KEYS:
            f.write(f'{key}={getattr(camera, key)!r}\n')

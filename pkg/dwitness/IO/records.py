from __future__ import annotations
import os
import numpy as np
from typing import Any, Dict, List, Optional, TYPE_CHECKING
from ..utils import atomic_write_text, file_digest, read_json, save_json, utc_timestamp

if TYPE_CHECKING:
    import pandas as pd
    from ..Scan.phase_grid import PhaseGrid

GRID_COLUMNS = ['B', 'T', 'J', 'delta', 'average', 'engine', 'W_signed', 'W', 'entangled']
BOUNDARY_COLUMNS = ['segment_id', 'B0', 'T0', 'B1', 'T1']
FLOAT_FORMAT = '%.17g'
SCHEMA_VERSION = 1

def grid_frame(g: PhaseGrid) -> pd.DataFrame:
    """Tabular form of a phase grid, one row per cell, T-major then B.

    Args:
        g (PhaseGrid): Scanned grid.

    Returns:
        pd.DataFrame: Frame with the grid CSV columns.
    """
    import pandas as pd
    nT, nB = g.shape
    meta = g.meta
    signed = g.signed.ravel()
    return pd.DataFrame({
        'B': np.tile(g.B_axis, nT),
        'T': np.repeat(g.T_axis, nB),
        'J': np.full(nT * nB, g.J),
        'delta': np.full(nT * nB, float(meta['delta'])),
        'average': [meta['average']] * (nT * nB),
        'engine': [meta['engine']] * (nT * nB),
        'W_signed': signed,
        'W': np.abs(signed),
        'entangled': g.entangled.ravel()
    }, columns=GRID_COLUMNS)

def boundary_frame(segments: np.ndarray) -> pd.DataFrame:
    import pandas as pd
    segments = np.asarray(segments, dtype=float).reshape(-1, 4)
    frame = pd.DataFrame(segments, columns=BOUNDARY_COLUMNS[1:])
    frame.insert(0, 'segment_id', np.arange(segments.shape[0]))
    return frame

def frame_to_csv(frame: pd.DataFrame, file_dir: str) -> str:
    """Write a frame as CSV with 17 significant digits, through an atomic rename.

    Args:
        frame (pd.DataFrame): Frame to write.
        file_dir (str): Target path.

    Returns:
        str: Absolute path of the file.
    """
    text = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    return atomic_write_text(text, file_dir)

def read_grid_csv(file_dir: str) -> pd.DataFrame:
    """Read a grid CSV back with exact float parsing.

    Args:
        file_dir (str): Path of the CSV.

    Returns:
        pd.DataFrame: Grid rows.
    """
    import pandas as pd
    frame = pd.read_csv(file_dir, float_precision='round_trip')
    if list(frame.columns) != GRID_COLUMNS:
        raise ValueError(f'"{file_dir}" is not a grid CSV; columns are {list(frame.columns)}.')
    return frame

def read_boundary_csv(file_dir: str) -> pd.DataFrame:
    import pandas as pd
    return pd.read_csv(file_dir, float_precision='round_trip')

class RunManifest:
    """Record of one command run: parameters, seed and digests of the files it wrote.
    """
    def __init__(self, command: str, parameters: Dict[str, Any], seed: Optional[int] = None,
                 outputs: Optional[List[Dict[str, str]]] = None, timestamp: Optional[str] = None,
                 schema_version: int = SCHEMA_VERSION) -> None:
        """Initialising the manifest.

        Args:
            command (str): Command line that produced the outputs.
            parameters (Dict[str, Any]): Run parameters.
            seed (Optional[int], optional): Seed, an unsigned 64-bit integer. Defaults to None.
            outputs (Optional[List[Dict[str, str]]], optional): Output files as {"path", "sha256"} entries. Defaults to None.
            timestamp (Optional[str], optional): UTC ISO-8601 time. Defaults to None, meaning now.
            schema_version (int, optional): Manifest schema version. Defaults to 1.
        """
        if (seed is not None) and not (0 <= int(seed) < 2 ** 64):
            raise ValueError(f'Seed must be an unsigned 64-bit integer, got {seed}.')
        self._command = command
        self._parameters = dict(parameters)
        self._seed = None if seed is None else int(seed)
        self._outputs = list(outputs) if outputs is not None else []
        self._timestamp = utc_timestamp() if timestamp is None else timestamp
        self._schema_version = int(schema_version)

    @property
    def command(self) -> str:
        return self._command

    @property
    def parameters(self) -> Dict[str, Any]:
        return dict(self._parameters)

    @property
    def seed(self) -> Optional[int]:
        return self._seed

    @property
    def outputs(self) -> List[Dict[str, str]]:
        return list(self._outputs)

    @property
    def timestamp(self) -> str:
        return self._timestamp

    @property
    def schema_version(self) -> int:
        return self._schema_version

    def add_output(self, file_dir: str) -> None:
        """Record a written file with its SHA-256 digest.

        Args:
            file_dir (str): Path of the file.
        """
        self._outputs.append(dict(path=os.path.abspath(file_dir), sha256=file_digest(file_dir)))

    def verify(self) -> List[str]:
        """Paths whose current content no longer matches the recorded digest.

        Returns:
            List[str]: Mismatching or missing files.
        """
        return list(map(lambda x: x['path'], filter(lambda x: (not os.path.exists(x['path'])) or (file_digest(x['path']) != x['sha256']),
                                                     self._outputs)))

    def to_dict(self) -> Dict[str, Any]:
        return dict(schema_version=self.schema_version, command=self.command, parameters=self.parameters,
                    seed=self.seed, outputs=self.outputs, timestamp=self.timestamp)

    def save(self, file_dir: str) -> str:
        save_json(self.to_dict(), file_dir)
        return os.path.abspath(file_dir)

    @classmethod
    def load(cls, file_dir: str) -> RunManifest:
        """Read a manifest written by save.

        Args:
            file_dir (str): Path of the JSON file.

        Returns:
            RunManifest: Manifest.
        """
        content = read_json(file_dir)
        if content.get('schema_version') != SCHEMA_VERSION:
            raise ValueError(f'Unsupported manifest schema version {content.get("schema_version")!r}.')
        return cls(command=content['command'], parameters=content['parameters'], seed=content.get('seed'),
                   outputs=content.get('outputs', []), timestamp=content.get('timestamp'),
                   schema_version=content['schema_version'])

def write_scan_outputs(g: PhaseGrid, prefix: str, command: str, parameters: Dict[str, Any], seed: Optional[int] = None) -> RunManifest:
    """Write <prefix>_grid.csv, <prefix>_boundary.csv and <prefix>_manifest.json. Files already written are removed if a later one fails.

    Args:
        g (PhaseGrid): Scanned grid.
        prefix (str): Output path prefix.
        command (str): Command line recorded in the manifest.
        parameters (Dict[str, Any]): Parameters recorded in the manifest.
        seed (Optional[int], optional): Seed recorded in the manifest. Defaults to None.

    Returns:
        RunManifest: Manifest of the written files.
    """
    written = []
    try:
        grid_file = frame_to_csv(grid_frame(g), f'{prefix}_grid.csv')
        written.append(grid_file)
        boundary_file = frame_to_csv(boundary_frame(g.boundary), f'{prefix}_boundary.csv')
        written.append(boundary_file)
        manifest = RunManifest(command, parameters, seed=seed)
        manifest.add_output(grid_file)
        manifest.add_output(boundary_file)
        written.append(manifest.save(f'{prefix}_manifest.json'))
    except BaseException:
        for f in written:
            if os.path.exists(f):
                os.remove(f)
        raise
    return manifest

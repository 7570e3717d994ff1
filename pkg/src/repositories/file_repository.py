"""Plain-text implementations of the repository interfaces: xyz, tets, OFF, JSON and CSV."""

import json
import logging
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from config.settings import get_project_root
from src.errors import CloudFormatError
from src.geometry.cloud import PointCloud, Provenance
from src.geometry.delaunay import Triangulation, hull_faces
from src.metrics.surfaces import SurfaceModel
from src.repositories.base import CloudRepository, MeshRepository, PathLike, ReportRepository

logger = logging.getLogger(__name__)

STATS_SCHEMA = 1


def _resolve(base: Path, name: PathLike) -> Path:
    # An absolute name replaces the base directory
    return base / Path(name)


def sidecar_path(path: Path) -> Path:
    """Provenance JSON next to a points file: clouds/helix.xyz -> clouds/helix.json."""
    return path.with_suffix(".json")


def stats_path(path: Path) -> Path:
    """Stats JSON next to a tets file: out/helix.tets -> out/helix.stats.json."""
    return path.with_suffix(".stats.json")


def _dump_json(path: Path, data: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(data, f, indent=2, default=str)
        f.write("\n")


class XYZCloudRepository(CloudRepository):
    """xyz text files, one "x y z" line per point, with a provenance sidecar."""

    def __init__(self, data_dir: Optional[Path] = None):
        """Initialize the repository.

        Args:
            data_dir: Directory for cloud files. Defaults to data/clouds/
        """
        if data_dir is None:
            data_dir = get_project_root() / "data" / "clouds"
        self.data_dir = Path(data_dir)

    def _get_file_path(self, name: PathLike) -> Path:
        return _resolve(self.data_dir, name)

    def read(self, name: PathLike) -> PointCloud:
        """Read an xyz file; the sidecar, when present, restores provenance and surface."""
        path = self._get_file_path(name)
        rows = []
        with open(path, "r") as f:
            for lineno, line in enumerate(f, start=1):
                fields = line.split()
                if not fields or fields[0].startswith("#"):
                    continue
                if len(fields) != 3:
                    raise CloudFormatError(f"{path}:{lineno}: expected 3 coordinates, got {len(fields)}")
                try:
                    rows.append([float(v) for v in fields])
                except ValueError as e:
                    raise CloudFormatError(f"{path}:{lineno}: {e}") from e
        if not rows:
            raise CloudFormatError(f"{path}: no points")

        provenance, surface = Provenance("external", {"source": str(path)}), None
        sidecar = sidecar_path(path)
        if sidecar.exists():
            with open(sidecar, "r") as f:
                meta = json.load(f)
            provenance = Provenance.from_dict(meta)
            surface = SurfaceModel.from_dict(meta.get("surface"))
        logger.debug("read %d points from %s", len(rows), path)
        return PointCloud(np.array(rows, dtype=float), provenance, surface)

    def write(self, name: PathLike, cloud: PointCloud) -> Path:
        """Write coordinates with repr() so every double round-trips exactly."""
        path = self._get_file_path(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            for x, y, z in cloud.points.tolist():
                f.write(f"{x!r} {y!r} {z!r}\n")

        meta = {**cloud.provenance.to_dict(), "n": len(cloud)}
        if cloud.surface is not None:
            meta["surface"] = cloud.surface.to_dict()
        _dump_json(sidecar_path(path), meta)
        logger.info("wrote %d points to %s", len(cloud), path)
        return path

    def exists(self, name: PathLike) -> bool:
        """Check if the xyz file exists."""
        return self._get_file_path(name).exists()


class TextMeshRepository(MeshRepository):
    """.tets files (four indices per line) and OFF hull meshes."""

    def __init__(self, data_dir: Optional[Path] = None):
        """Initialize the repository.

        Args:
            data_dir: Directory for mesh files. Defaults to data/meshes/
        """
        if data_dir is None:
            data_dir = get_project_root() / "data" / "meshes"
        self.data_dir = Path(data_dir)

    def write_tets(self, name: PathLike, tri: Triangulation) -> Path:
        path = _resolve(self.data_dir, name)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            for a, b, c, d in tri.finite_tets.tolist():
                f.write(f"{a} {b} {c} {d}\n")
        return path

    def read_tets(self, name: PathLike) -> np.ndarray:
        """Read a .tets file back as a (T, 4) int array."""
        path = _resolve(self.data_dir, name)
        try:
            tets = np.loadtxt(path, dtype=np.int64, ndmin=2)
        except ValueError as e:
            raise CloudFormatError(f"{path}: {e}") from e
        return tets.reshape(-1, 4)

    def write_hull(self, name: PathLike, tri: Triangulation) -> Path:
        """OFF file with every cloud vertex and the outward hull triangles."""
        path = _resolve(self.data_dir, name)
        path.parent.mkdir(parents=True, exist_ok=True)
        faces = hull_faces(tri)
        with open(path, "w") as f:
            f.write("OFF\n")
            f.write(f"{tri.n_vertices} {len(faces)} 0\n")
            for x, y, z in tri.cloud.points.tolist():
                f.write(f"{x!r} {y!r} {z!r}\n")
            for a, b, c in faces.tolist():
                f.write(f"3 {a} {b} {c}\n")
        return path


class FileReportRepository(ReportRepository):
    """JSON reports (indent 2, insertion order) and CSV tables."""

    def __init__(self, data_dir: Optional[Path] = None):
        """Initialize the repository.

        Args:
            data_dir: Directory for reports. Defaults to data/reports/
        """
        if data_dir is None:
            data_dir = get_project_root() / "data" / "reports"
        self.data_dir = Path(data_dir)

    def write_json(self, name: PathLike, data: dict) -> Path:
        path = _resolve(self.data_dir, name)
        _dump_json(path, data)
        return path

    def read_json(self, name: PathLike) -> dict:
        with open(_resolve(self.data_dir, name), "r") as f:
            return json.load(f)

    def write_table(self, name: PathLike, df: pd.DataFrame) -> int:
        path = _resolve(self.data_dir, name)
        path.parent.mkdir(parents=True, exist_ok=True)
        df.to_csv(path, index=False)
        return len(df)

    def read_table(self, name: PathLike) -> pd.DataFrame:
        path = _resolve(self.data_dir, name)
        if not path.exists():
            return pd.DataFrame()
        return pd.read_csv(path)

"""Abstract base classes for clouds, meshes and reports on disk."""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Union

import pandas as pd

from src.geometry.cloud import PointCloud
from src.geometry.delaunay import Triangulation

PathLike = Union[str, Path]


class CloudRepository(ABC):
    """Abstract base class for point cloud storage."""

    @abstractmethod
    def read(self, name: PathLike) -> PointCloud:
        """Read a point cloud.

        Args:
            name: File name relative to the repository directory, or an absolute path

        Returns:
            PointCloud with the stored provenance, if any
        """
        pass

    @abstractmethod
    def write(self, name: PathLike, cloud: PointCloud) -> Path:
        """Write a point cloud and its provenance.

        Args:
            name: File name relative to the repository directory, or an absolute path
            cloud: Cloud to store

        Returns:
            Path of the written points file
        """
        pass

    @abstractmethod
    def exists(self, name: PathLike) -> bool:
        """Check if a cloud file exists."""
        pass


class MeshRepository(ABC):
    """Abstract base class for triangulation output."""

    @abstractmethod
    def write_tets(self, name: PathLike, tri: Triangulation) -> Path:
        """Write the finite tetrahedra, one per line.

        Returns:
            Path of the written file
        """
        pass

    @abstractmethod
    def write_hull(self, name: PathLike, tri: Triangulation) -> Path:
        """Write the hull surface mesh.

        Returns:
            Path of the written file
        """
        pass


class ReportRepository(ABC):
    """Abstract base class for JSON reports and experiment tables."""

    @abstractmethod
    def write_json(self, name: PathLike, data: dict) -> Path:
        """Write a JSON document."""
        pass

    @abstractmethod
    def read_json(self, name: PathLike) -> dict:
        """Read a JSON document."""
        pass

    @abstractmethod
    def write_table(self, name: PathLike, df: pd.DataFrame) -> int:
        """Write a table.

        Returns:
            Number of rows written
        """
        pass

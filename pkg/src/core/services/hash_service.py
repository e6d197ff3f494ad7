"""Модуль для работы с хеш-функциями."""

import hashlib
from pathlib import Path

CHUNK_SIZE = 1 << 20


class HashService:
    """Класс для работы с хеш-функциями."""

    @staticmethod
    def file_digest(path: Path) -> str:
        """
        Сгенерировать хэш содержимого файла.

        Args:
            path (Path): Путь к файлу.

        Returns:
            str: SHA-256 в шестнадцатеричном виде.
        """
        digest = hashlib.sha256()
        with path.open("rb") as file:
            while chunk := file.read(CHUNK_SIZE):
                digest.update(chunk)
        return digest.hexdigest()

    @classmethod
    def tree_digests(cls, root: Path) -> dict[str, str]:
        """Хэши всех файлов каталога (или одного файла) по относительному пути."""

        if root.is_file():
            return {root.name: cls.file_digest(root)}
        if not root.is_dir():
            return {}
        return {
            path.relative_to(root).as_posix(): cls.file_digest(path)
            for path in sorted(root.rglob("*"))
            if path.is_file()
        }

# Conversions between the JSON file models and the domain objects

from typing import Type, TypeVar

from pydantic import BaseModel, ValidationError

from quantum.domain import KrausChannel, MatrixTuple, Signature, Superoperator
from quantum.protocol import ChannelFile, MatrixLiteral, SuperoperatorFile, TupleFile
from utils.errors import InputFileError
from utils.helpers import load_json

T = TypeVar("T", bound=MatrixTuple)
M = TypeVar("M", bound=BaseModel)


def tuple_to_file(t: MatrixTuple) -> TupleFile:
    return TupleFile(sig=list(t.sig.dims),
                     entries=[MatrixLiteral.from_matrix(e) for e in t.entries])


def tuple_from_file(data: TupleFile, cls: Type[T]) -> T:
    return cls(Signature(dims=tuple(data.sig)), tuple(e.to_array() for e in data.entries))


def channel_to_file(c: KrausChannel) -> ChannelFile:
    return ChannelFile(in_dim=c.in_dim, out_dim=c.out_dim,
                       kraus=[MatrixLiteral.from_matrix(e) for e in c.kraus])


def channel_from_file(data: ChannelFile) -> KrausChannel:
    return KrausChannel(data.in_dim, data.out_dim, tuple(e.to_array() for e in data.kraus))


def superop_to_file(f: Superoperator) -> SuperoperatorFile:
    return SuperoperatorFile(in_sig=list(f.in_sig.dims), out_sig=list(f.out_sig.dims),
                             blocks=[[channel_to_file(c) for c in row] for row in f.blocks])


def superop_from_file(data: SuperoperatorFile) -> Superoperator:
    return Superoperator(Signature(dims=tuple(data.in_sig)), Signature(dims=tuple(data.out_sig)),
                         tuple(tuple(channel_from_file(c) for c in row) for row in data.blocks))


def read_model(path: str, model: Type[M]) -> M:
    """
    Load a JSON file and validate it against a file model.

    Raises:
        InputFileError: If the file is unreadable, not JSON, or has the wrong shape
    """
    raw = load_json(path)
    try:
        return model.model_validate(raw)
    except ValidationError as e:
        raise InputFileError(f"{path} is not a valid {model.__name__}: {e}") from e


def load_tuple(path: str, cls: Type[T]) -> T:
    return tuple_from_file(read_model(path, TupleFile), cls)


def load_channel(path: str) -> KrausChannel:
    return channel_from_file(read_model(path, ChannelFile))


def load_superop(path: str) -> Superoperator:
    return superop_from_file(read_model(path, SuperoperatorFile))

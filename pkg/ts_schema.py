# Load the report schemas and validate emitted reports against them.
import os
from copy import deepcopy

import jsonschema
import yaml

DEFAULT_SCHEMA_PATH = os.path.join(os.path.dirname(__file__), "reference", "reports.yaml")


class ReportSpec:
    """A class containing the report schemas and utilities for resolving and validating them"""
    def __init__(self, schema_path: str = DEFAULT_SCHEMA_PATH):
        """
        Load the report schemas from a YAML file.

        :param schema_path: The path to the file
        """
        with open(schema_path) as schema_f:
            self.spec = yaml.safe_load(schema_f.read())

    def get_schema(self, schema_name: str, resolve_references=False) -> dict:
        """
        Return a schema, optionally with all references resolved.

        :param schema_name: The name of the schema in #/components/schemas
        :param resolve_references: If this is True, replace all references with their actual values.
        """
        schema = self.spec["components"]["schemas"][schema_name]
        if resolve_references:
            return self.build_schema(schema)
        return schema

    def build_schema(self, in_schema: dict) -> dict:
        """
        Recursively resolve all references in a schema for validation.

        **WARNING: Circular references will cause a RecursionError**

        :param in_schema: A schema with references
        :return: A deep copy of the input schema with all references resolved
        """
        out_schema = deepcopy(in_schema)
        if "$ref" in out_schema:
            out_schema.update(self.build_schema(self.lookup_ref(out_schema.pop("$ref"))))
        for keyword in ("oneOf", "allOf", "anyOf"):
            if keyword in out_schema:
                out_schema[keyword] = [self.build_schema(value) for value in out_schema[keyword]]
        if "properties" in out_schema:
            for prop, value in out_schema["properties"].items():
                out_schema["properties"][prop] = self.build_schema(value)
        if isinstance(out_schema.get("items"), dict):
            out_schema["items"] = self.build_schema(out_schema["items"])
        return out_schema

    def lookup_ref(self, path: str):
        """
        Return the value of the object at the specified path.

        :param path: A slash-delimited string starting with # that defines the path to the schema
        :return: The result of the lookup
        """
        if not path.startswith("#/"):
            raise ValueError(f"Path '{path}' is not absolute")
        root = self.spec
        for layer in path.split("/")[1:]:
            root = root[layer]
        return root

    def validate(self, instance, schema_name: str):
        """
        Validate an instance against a named schema.

        :param instance: The decoded JSON value
        :param schema_name: The name of the schema in #/components/schemas
        :raises jsonschema.exceptions.ValidationError: If the instance does not match
        """
        jsonschema.validate(instance, self.get_schema(schema_name, resolve_references=True))

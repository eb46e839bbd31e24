from pathlib import Path

from rest_framework import serializers

from .conf import DEFAULTS
from .constants import (
    EMPTY_GRID_ERROR, EXPERIMENTS, INVALID_FAMILY_ERROR, MAX_CELL_SIZE,
    MAX_CHAIN_SIZE, MAX_K, MISSING_FIELD_ERROR, NON_POSITIVE_TOLERANCE_ERROR,
    UNKNOWN_TOLERANCE_ERROR
)
from .models import ExperimentConfig
from .potentials import PotentialFamily

TOLERANCE_KEYS = {key for key, value in DEFAULTS.items()
                  if isinstance(value, (int, float))}


def grid_field(child):
    return serializers.ListField(
        child=child, required=False, allow_empty=False,
        error_messages={'empty': EMPTY_GRID_ERROR}
    )


class FamilySerializer(serializers.Serializer):
    k1 = serializers.FloatField(required=False)
    k2 = serializers.FloatField(required=False)
    K = serializers.IntegerField(required=False)

    def validate(self, data):
        k1 = data.get('k1')
        k2 = data.get('k2')
        K = data.get('K')

        if k1 is None or k2 is None or K is None:
            raise serializers.ValidationError(MISSING_FIELD_ERROR)

        if not (k1 > 0 and k2 > 0 and 1 <= K <= MAX_K):
            raise serializers.ValidationError(
                INVALID_FAMILY_ERROR.format(max_K=MAX_K)
            )

        return data


class GridsSerializer(serializers.Serializer):
    z_grid = grid_field(serializers.FloatField())
    z_factors = grid_field(serializers.FloatField())
    N_list = grid_field(
        serializers.IntegerField(min_value=1, max_value=MAX_CELL_SIZE)
    )
    n_list = grid_field(
        serializers.IntegerField(min_value=1, max_value=MAX_CHAIN_SIZE)
    )
    ell_grid = grid_field(serializers.FloatField(min_value=0))
    ell_factors = grid_field(serializers.FloatField(min_value=0))

    def validate_z_grid(self, value):
        if any(z <= 0 for z in value):
            raise serializers.ValidationError('Strains must be positive')
        return value

    def validate_z_factors(self, value):
        return self.validate_z_grid(value)

    def validate(self, data):
        for first, second in (('z_grid', 'z_factors'),
                              ('ell_grid', 'ell_factors')):
            if first in data and second in data:
                raise serializers.ValidationError(
                    f'Give either {first} or {second}, not both'
                )
        return data


class ExperimentConfigSerializer(serializers.Serializer):
    family = FamilySerializer(required=False)
    experiment = serializers.ChoiceField(choices=EXPERIMENTS, required=False)
    grids = GridsSerializer(required=False)
    tolerances = serializers.DictField(
        child=serializers.FloatField(), required=False
    )
    output_dir = serializers.CharField(required=False, allow_blank=False)
    seed = serializers.IntegerField(required=False, min_value=0)

    def create(self, validated_data):
        family = PotentialFamily(**validated_data['family'])
        tolerances = {
            key: type(DEFAULTS[key])(value)
            for key, value in validated_data.get('tolerances', {}).items()
        }
        output_dir = validated_data.get('output_dir')
        return ExperimentConfig(
            family=family,
            experiment=validated_data['experiment'],
            grids=dict(validated_data.get('grids', {})),
            tolerances=tolerances,
            output_dir=Path(output_dir) if output_dir else None,
            seed=validated_data.get('seed', 0),
        )

    def validate_tolerances(self, value):
        for name, tolerance in value.items():
            if name not in TOLERANCE_KEYS:
                raise serializers.ValidationError(
                    UNKNOWN_TOLERANCE_ERROR.format(name=name)
                )
            if not tolerance > 0:
                raise serializers.ValidationError(
                    NON_POSITIVE_TOLERANCE_ERROR
                )
        return value

    def validate(self, data):
        family = data.get('family')
        experiment = data.get('experiment')

        if not (family and experiment):
            raise serializers.ValidationError(MISSING_FIELD_ERROR)

        K = family['K']
        grids = data.get('grids', {})
        if any(N < 2 * K + 2 for N in grids.get('N_list', [])):
            raise serializers.ValidationError(
                f'Cell sizes in N_list must be at least 2K + 2 = {2 * K + 2}'
            )
        if any(n < 8 * K for n in grids.get('n_list', [])):
            raise serializers.ValidationError(
                f'Chain sizes in n_list must be at least 8K = {8 * K}'
            )
        if experiment == 'decay' and K != 2:
            raise serializers.ValidationError(
                'The decay experiment needs K = 2'
            )

        return data


class AuditCheckSerializer(serializers.Serializer):
    name = serializers.CharField()
    status = serializers.CharField()
    margin = serializers.FloatField(allow_null=True)
    witness = serializers.FloatField(allow_null=True)
    sampled = serializers.BooleanField()
    note = serializers.CharField(allow_blank=True)


class EffectiveModelSerializer(serializers.Serializer):
    family = FamilySerializer()
    gamma = serializers.FloatField()
    delta = serializers.SerializerMethodField()
    c = serializers.ListField(child=serializers.FloatField())
    alpha = serializers.FloatField()
    jcb_at_gamma = serializers.FloatField()
    psi_at_gamma = serializers.ListField(child=serializers.FloatField())

    def get_delta(self, obj):
        return [float(delta) for delta in obj.family.landmarks().delta]


class BetaReportSerializer(serializers.Serializer):
    beta = serializers.FloatField()
    beta_tilde = serializers.FloatField()
    discrepancy = serializers.FloatField()
    B = serializers.FloatField(allow_null=True)
    B_tilde = serializers.FloatField()
    N = serializers.IntegerField()
    converged = serializers.BooleanField()
    route = serializers.CharField()


class DecayReportSerializer(serializers.Serializer):
    lam = serializers.FloatField()
    C_const = serializers.FloatField()
    alpha_lb = serializers.FloatField()
    violations = serializers.ListField(child=serializers.IntegerField())
    monotone_violations = serializers.ListField(
        child=serializers.IntegerField()
    )
    window_violations = serializers.ListField(
        child=serializers.IntegerField()
    )
    certified = serializers.BooleanField()

    def to_representation(self, instance):
        data = super().to_representation(instance)
        data['lambda'] = data.pop('lam')
        return data

use schemars::schema_for;
use serde_json::Value;

use crate::report::*;
use crate::scenario::*;

/// JSON Schema of the scenario document for `kind`.
pub fn scenario_schema(kind: Kind) -> Value {
    let s = match kind {
        Kind::GrowthOrder => schema_for!(Document<GrowthOrderParams>),
        Kind::IntegralFormula => schema_for!(Document<IntegralFormulaParams>),
        Kind::RatioScan => schema_for!(Document<RatioScanParams>),
        Kind::AnnulusScan => schema_for!(Document<AnnulusScanParams>),
        Kind::VolumeScan => schema_for!(Document<VolumeScanParams>),
        Kind::Bernstein => schema_for!(Document<BernsteinParams>),
        Kind::GaussEnergy => schema_for!(Document<GaussEnergyParams>),
    };
    serde_json::to_value(s).expect("schemas serialize")
}

/// JSON Schema of the report written for `kind`.
pub fn report_schema(kind: Kind) -> Value {
    let s = match kind {
        Kind::GrowthOrder => schema_for!(Report<GrowthOrderResult>),
        Kind::IntegralFormula => schema_for!(Report<IntegralFormulaResult>),
        Kind::RatioScan | Kind::AnnulusScan | Kind::VolumeScan => schema_for!(Report<ScanResult>),
        Kind::Bernstein => schema_for!(Report<BernsteinResult>),
        Kind::GaussEnergy => schema_for!(Report<GaussEnergyResult>),
    };
    serde_json::to_value(s).expect("schemas serialize")
}

/// Column names of the CSV written for `kind`.
pub fn csv_header(kind: Kind) -> &'static [&'static str] {
    match kind {
        Kind::GrowthOrder => GrowthOrderResult::HEADER,
        Kind::IntegralFormula => IntegralFormulaResult::HEADER,
        Kind::RatioScan | Kind::AnnulusScan | Kind::VolumeScan => ScanResult::HEADER,
        Kind::Bernstein => BernsteinResult::HEADER,
        Kind::GaussEnergy => GaussEnergyResult::HEADER,
    }
}

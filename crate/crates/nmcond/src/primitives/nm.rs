use super::twosource::block_ip;
use crate::bitcore::BitString;
use crate::Result;

/// Inner-product non-malleable extractor: |x| = |y|, output the GF(2^m)
/// block inner product.
pub fn nm_ip(x: &BitString, y: &BitString, m: usize) -> Result<BitString> {
    block_ip(x, y, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcore::{gf_mul, FieldElem};
    use crate::distoracle::{verify_nm_extractor, AdversarySet, FlatFamily, SourceSpec};
    use crate::Error;

    fn b(s: &str) -> BitString {
        BitString::parse(s).unwrap()
    }

    #[test]
    fn examples() {
        let prod = gf_mul(FieldElem::from_bits(&b("01")).unwrap(), FieldElem::from_bits(&b("10")).unwrap())
            .unwrap();
        assert_eq!(nm_ip(&b("01"), &b("10"), 2).unwrap(), prod.to_bits());
        for y in BitString::all(4) {
            assert_eq!(nm_ip(&BitString::zeros(4), &y, 2).unwrap(), b("00"));
        }
        assert_eq!(nm_ip(&b("01"), &b("1"), 1), Err(Error::UnequalLengths(2, 1)));
    }

    #[test]
    fn decomposition_equals_literal_sweep_at_two_bits() {
        let f = |x: &BitString, y: &BitString| nm_ip(x, y, 1).unwrap();
        let sources: Vec<SourceSpec> = FlatFamily::exhaustive(2, 1).sources().collect();
        let rep = verify_nm_extractor(&f, 2, 2, 1, 1, &sources, &AdversarySet::exhaustive()).unwrap();
        assert!(rep.exhaustive);
        assert_eq!(rep.adversaries_checked, 81);
        assert_eq!(rep.report.worst_distance, rep.decomposed_worst);
    }
}

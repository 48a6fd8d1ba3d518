//! Embedded template fragments and slot filling.
//!
//! Files are embedded verbatim via `include_str!`; they are UTF-8 and
//! newline-normalized to `\n` in the repository.

pub const TARGET_RICH: &str = include_str!("../templates/parts/target_rich.txt");
pub const TARGET_SCARCE: &str = include_str!("../templates/parts/target_scarce.txt");
pub const SUFFIX_ANSWER: &str = include_str!("../templates/parts/suffix_answer.txt");
pub const SUFFIX_COT: &str = include_str!("../templates/parts/suffix_cot.txt");
pub const HOP_HEADER: &str = include_str!("../templates/parts/hop_header.txt");
pub const NEIGHBOR_TITLE: &str = include_str!("../templates/parts/neighbor_title.txt");
pub const NEIGHBOR_LABEL: &str = include_str!("../templates/parts/neighbor_label.txt");
pub const NEIGHBOR_LINKS: &str = include_str!("../templates/parts/neighbor_links.txt");
pub const LINEAR_TITLE: &str = include_str!("../templates/parts/linear_title.txt");
pub const ATTENTION_EXTRACT: &str = include_str!("../templates/parts/attention_extract.txt");
pub const ATTENTION_RANK_LINE: &str = include_str!("../templates/parts/attention_rank_line.txt");
pub const ATTENTION_HEADER: &str = include_str!("../templates/parts/attention_header.txt");
pub const FEWSHOT_EXAMPLE_RICH: &str = include_str!("../templates/parts/fewshot_example_rich.txt");
pub const FEWSHOT_EXAMPLE_SCARCE: &str =
    include_str!("../templates/parts/fewshot_example_scarce.txt");

pub const SYSTEM_ARXIV: &str = include_str!("../templates/system/arxiv.txt");
pub const SYSTEM_CORA: &str = include_str!("../templates/system/cora.txt");
pub const SYSTEM_PUBMED: &str = include_str!("../templates/system/pubmed.txt");
pub const SYSTEM_PRODUCTS: &str = include_str!("../templates/system/products.txt");
pub const SYSTEM_OPTION_GENERIC: &str = include_str!("../templates/system/option_generic.txt");

/// Fill `{name}` slots in a template. Panics on a slot without a binding;
/// templates and call sites are fixed at compile time, so an unbound slot is
/// a programming error caught by the golden tests.
pub fn fill(template: &str, bindings: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len() + 64);
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let close = after
            .find('}')
            .unwrap_or_else(|| panic!("unterminated slot in template: {template:?}"));
        let name = &after[..close];
        let value = bindings
            .iter()
            .find(|(k, _)| *k == name)
            .map(|(_, v)| *v)
            .unwrap_or_else(|| panic!("no binding for slot {{{name}}}"));
        out.push_str(value);
        rest = &after[close + 1..];
    }
    out.push_str(rest);
    out
}

use std::io::{self, Write};

use super::RawArticle;

/// Writes one record in PubTator bulk format, followed by a blank line.
pub fn write_article<W: Write>(mut w: W, article: &RawArticle) -> io::Result<()> {
    writeln!(w, "{}|t|{}", article.pmid, article.title)?;
    writeln!(w, "{}|a|{}", article.pmid, article.abstract_text)?;
    for a in &article.annotations {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}",
            article.pmid, a.start, a.end, a.mention, a.semantic_type, a.identifier
        )?;
    }
    writeln!(w)
}

pub fn to_pubtator_string(article: &RawArticle) -> String {
    let mut buf = Vec::new();
    write_article(&mut buf, article).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("article fields are valid UTF-8")
}

use ou_yule::cli;
use ou_yule::error::Error;

fn main() {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    if argv.first().map(String::as_str) == Some("help")
        || argv.iter().any(|a| a == "--help" || a == "-h")
    {
        println!("{}", cli::usage());
        return;
    }

    let spec = match cli::parse_cli(&argv) {
        Ok(spec) => spec,
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("{}", cli::usage());
            std::process::exit(2);
        }
    };

    match cli::run(&spec).and_then(|text| cli::emit(&spec, &text)) {
        Ok(Some(text)) => print!("{text}"),
        Ok(None) => {}
        Err(e @ Error::Usage(_)) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}

// Apache License, Version 2.0, refer to LICENSE.txt
